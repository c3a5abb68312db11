#include <gtest/gtest.h>

#include <algorithm>

#include "hetnet/optimizer.hpp"
#include "reference_configs.hpp"

namespace hetnet {
namespace {

TEST(OptimalInDof, AnalyticArgmaxOfTrace) {
  const CoverageAnalyzer an(test::fig3_config(4.6));
  for (double tau : {1e2, 1e4, 1e6}) {
    const OptimizationResult r = optimal_in_dof(tau, an, LoadModel::MeanLoad);
    ASSERT_EQ(r.trace.size(), 5u);
    const auto best = std::max_element(r.trace.begin(), r.trace.end()) - r.trace.begin();
    EXPECT_EQ(r.argmax, static_cast<double>(best));
    EXPECT_EQ(r.value, r.trace[best]);
    EXPECT_EQ(r.engine, Engine::AnalyticMla);
  }
  EXPECT_THROW(optimal_in_dof(0.0, an, LoadModel::MeanLoad), std::domain_error);
}

TEST(OptimalInDof, SmallRateAnchors) {
  EXPECT_EQ(optimal_in_dof(1e3, test::fig3_config(4.6)).argmax, 3.0);
  EXPECT_EQ(optimal_in_dof(1e3, test::fig3_config(2.5)).argmax, 2.0);
}

TEST(OptimalInDof, TiesGoToSmallerU) {
  // Every trial has the same SIR for every U, so the objective is flat.
  NetworkConfig c = test::fig2_config();
  std::vector<TrialRecord> records(10);
  std::vector<double> sir(10 * 8, 3.0);
  SimulationOptions o;
  o.trials = 10;
  const TrialSet set(c, o, records, sir);
  const OptimizationResult r = optimal_in_dof(1e5, set);
  EXPECT_EQ(r.argmax, 0.0);
  EXPECT_EQ(r.engine, Engine::MonteCarlo);
  EXPECT_EQ(std::count(r.trace.begin(), r.trace.end(), r.trace[0]), 8);
}

TEST(OptimalInDof, MonteCarloEngineAgreesWithAnalysisAtModerateRate) {
  OptimizerOptions o;
  o.engine = Engine::MonteCarlo;
  o.simulation.trials = 1500;
  const NetworkConfig c = test::fig3_config(4.6);
  const OptimizationResult mc = optimal_in_dof(3e5, c, o);
  const OptimizationResult an = optimal_in_dof(3e5, c);
  // Objective values agree even if a near-flat trace moves the argmax.
  EXPECT_NEAR(mc.trace[static_cast<int>(an.argmax)], an.value, 0.05);
}

TEST(AsymptoticOptimum, SettlesInPredictedSet) {
  const double taus[] = {1e4, 3e3, 1e3, 3e2, 1e2};
  for (double b_db : {2.5, 4.6}) {
    const AsymptoticCheck chk = verify_asymptotic_optimum(test::fig3_config(b_db), taus);
    EXPECT_TRUE(chk.holds) << b_db;
    EXPECT_TRUE(chk.conclusive);
    EXPECT_TRUE(chk.limit == 2 || chk.limit == 3);
    EXPECT_EQ(chk.optimum.size(), 5u);
  }
  const double increasing[] = {1e2, 1e3};
  EXPECT_THROW(verify_asymptotic_optimum(test::fig3_config(), increasing), std::domain_error);
}

class AbsTrials : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SimulationOptions o;
    o.trials = 1500;
    o.seed = 17;
    set_ = new TrialSet(simulate_trials(test::fig4_config(8, 6, 9.0), o));
  }
  static void TearDownTestSuite() {
    delete set_;
    set_ = nullptr;
  }
  static const TrialSet& set() { return *set_; }

 private:
  static inline TrialSet* set_ = nullptr;
};

TEST_F(AbsTrials, GoldenSectionFindsTracePeak) {
  const OptimizationResult r = optimal_abs_fraction(5e5, set());
  ASSERT_EQ(r.grid.size(), 99u);
  EXPECT_GT(r.argmax, 0.0);
  EXPECT_LT(r.argmax, 1.0);
  const double peak = *std::max_element(r.trace.begin(), r.trace.end());
  EXPECT_GE(r.value, peak - 1.0 / std::sqrt(1500.0));
  EXPECT_NEAR(r.value, set().coverage(SchemeSpec::abs(r.argmax), 5e5), 1e-15);
}

TEST_F(AbsTrials, BiasSweepReportsEverySchemeAtEveryBias) {
  const double biases[] = {6.0, 12.0};
  SimulationOptions o;
  o.trials = 400;
  o.seed = 2;
  const BiasSweep sweep = bias_sweep(5e5, test::fig4_config(8, 6), biases, o);
  ASSERT_EQ(sweep.points.size(), 6u);
  for (const SweepPoint& p : sweep.points) {
    EXPECT_EQ(p.total.trials, 400);
    if (p.scheme == SweepScheme::NoIn) EXPECT_EQ(p.parameter, 0.0);
    if (p.scheme == SweepScheme::InOptimal) EXPECT_TRUE(p.parameter >= 0.0 && p.parameter <= 7.0);
    if (p.scheme == SweepScheme::AbsOptimal) EXPECT_TRUE(p.parameter > 0.0 && p.parameter < 1.0);
  }
  for (SweepScheme s : kSweepSchemes) {
    const SweepPoint& best = sweep.best(s);
    for (const SweepPoint& p : sweep.points)
      if (p.scheme == s) EXPECT_LE(p.total.value, best.total.value);
  }
  // IN with the best U includes U = 0 among its candidates.
  for (std::size_t b = 0; b < 2; ++b)
    EXPECT_GE(sweep.points[3 * b].total.value, sweep.points[3 * b + 1].total.value);
  const double bad[] = {-1.0};
  EXPECT_THROW(bias_sweep(5e5, test::fig4_config(8, 6), bad, o), ConfigError);
}

}  // namespace
}  // namespace hetnet
