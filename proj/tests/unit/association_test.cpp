#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "hetnet/association.hpp"
#include "reference_configs.hpp"

namespace hetnet {
namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

AssociationProbabilities equal_pathloss_closed_form(const NetworkConfig& c) {
  const double d = 2.0 / c.macro.pathloss;
  const double m = c.macro.density * std::pow(c.macro.power, d);
  const double p_biased = c.pico.density * std::pow(c.bias * c.pico.power, d);
  const double p_plain = c.pico.density * std::pow(c.pico.power, d);
  AssociationProbabilities a;
  a.macro = m / (m + p_biased);
  a.pico_unoffloaded = p_plain / (m + p_plain);
  a.offloaded = p_biased / (m + p_biased) - a.pico_unoffloaded;
  return a;
}

TEST(AssociationProbabilities, EqualPathlossClosedForm) {
  for (double b_db : {0.0, 2.5, 5.0, 10.0, 20.0}) {
    const NetworkConfig c = test::fig2_config(b_db);
    const auto a = association_probabilities(c);
    const auto ref = equal_pathloss_closed_form(c);
    EXPECT_NEAR(a.macro, ref.macro, 1e-9) << b_db;
    EXPECT_NEAR(a.pico_unoffloaded, ref.pico_unoffloaded, 1e-9) << b_db;
    EXPECT_NEAR(a.offloaded, ref.offloaded, 1e-9) << b_db;
    EXPECT_NEAR(a.macro + a.pico_unoffloaded + a.offloaded, 1.0, 1e-9);
  }
  EXPECT_NEAR(association_probabilities(test::fig2_config(0.0)).offloaded, 0.0, 1e-12);
}

TEST(AssociationProbabilities, UnequalPathlossMatchesNearestDistanceIntegrals) {
  const NetworkConfig c = test::fig4_config(8, 6, 9.0);
  const double a1 = c.macro.pathloss, a2 = c.pico.pathloss;
  const double l1 = c.macro.density, l2 = c.pico.density;
  boost::math::quadrature::exp_sinh<double> q;
  const double macro = q.integrate(
      [&](double x) {
        const double y = std::pow(c.bias * c.pico.power / c.macro.power * std::pow(x, a1), 1.0 / a2);
        return 2 * pi * l1 * x * std::exp(-pi * l1 * x * x - pi * l2 * y * y);
      },
      0.0, kInf, 1e-13);
  const double pico_plain = q.integrate(
      [&](double y) {
        const double x = std::pow(c.macro.power / c.pico.power * std::pow(y, a2), 1.0 / a1);
        return 2 * pi * l2 * y * std::exp(-pi * l2 * y * y - pi * l1 * x * x);
      },
      0.0, kInf, 1e-13);
  const auto a = association_probabilities(c);
  EXPECT_NEAR(a.macro, macro, 1e-9);
  EXPECT_NEAR(a.pico_unoffloaded, pico_plain, 1e-9);
  EXPECT_NEAR(a.macro + a.pico_unoffloaded + a.offloaded, 1.0, 1e-9);
}

TEST(AssociationDensities, IntegrateToOne) {
  for (const NetworkConfig& c : {test::fig2_config(5.0), test::fig4_config(8, 6, 12.0)}) {
    const auto probs = association_probabilities(c);
    boost::math::quadrature::exp_sinh<double> q;
    for (ServingClass k : {ServingClass::Macro, ServingClass::PicoUnoffloaded}) {
      const double mass = q.integrate(
          [&](double y) { return serving_distance_density(k, y, c, probs); }, 0.0, kInf, 1e-12);
      EXPECT_NEAR(mass, 1.0, 1e-8);
    }
    const double mass = q.integrate(
        [&](double x) {
          const OffloadStrip s = offload_strip(x, c);
          return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
              [&](double y) { return joint_distance_density(x, y, c, probs); }, s.lower, s.upper,
              10, 1e-12);
        },
        0.0, kInf, 1e-10);
    EXPECT_NEAR(mass, 1.0, 1e-7);
  }
}

TEST(OffloadStrip, EqualPathlossIsLinear) {
  const NetworkConfig c = test::fig2_config(5.0);
  const OffloadStrip s = offload_strip(100.0, c);
  EXPECT_NEAR(s.lower, 100.0 * std::pow(0.1, 0.25), 1e-10);
  EXPECT_NEAR(s.upper, 100.0 * std::pow(c.bias * 0.1, 0.25), 1e-10);
  EXPECT_EQ(joint_distance_density(100.0, s.lower * 0.99, c, association_probabilities(c)), 0.0);
  EXPECT_EQ(joint_distance_density(100.0, s.upper * 1.01, c, association_probabilities(c)), 0.0);
}

TEST(GammaCountPmf, SumsToOneWithNegativeBinomialMean) {
  for (int extra : {0, 1})
    for (double ratio : {0.05, 1.0, 7.3, 40.0}) {
      const double shape = 3.5;
      double mass = 0.0, mean = 0.0;
      for (int k = 0; k < 5000; ++k) {
        const double p = gamma_count_pmf(k, ratio, shape, extra);
        EXPECT_GE(p, 0.0);
        mass += p;
        mean += k * p;
      }
      EXPECT_NEAR(mass, 1.0, 1e-9);
      EXPECT_NEAR(mean, (shape + extra) * ratio / shape, 1e-7 * (1 + ratio));
    }
  EXPECT_EQ(gamma_count_pmf(0, 0.0, 3.5, 1), 1.0);
  EXPECT_EQ(gamma_count_pmf(3, 0.0, 3.5, 1), 0.0);
  EXPECT_EQ(gamma_count_pmf(-1, 2.0, 3.5, 1), 0.0);
}

TEST(GammaCountPmf, SupportBoundCoversRequestedMass) {
  const int n = pmf_support_bound(12.0, 3.5, 1, 1e-9);
  double mass = 0.0;
  for (int k = 0; k < n; ++k) mass += gamma_count_pmf(k, 12.0, 3.5, 1);
  EXPECT_GE(mass, 1.0 - 1e-9);
  EXPECT_LT(mass - gamma_count_pmf(n - 1, 12.0, 3.5, 1), 1.0 - 1e-9);
}

TEST(AssociationModel, LoadPmfsSumToOne) {
  for (const NetworkConfig& c : {test::fig2_config(), test::fig3_config(), test::fig4_config(18, 16)}) {
    const AssociationModel m(c);
    for (Tier t : {Tier::Macro, Tier::Pico}) {
      double mass = 0.0, mean = 0.0;
      for (int n = 1; n < 20000; ++n) {
        mass += m.load_pmf(t, n);
        mean += n * m.load_pmf(t, n);
      }
      EXPECT_NEAR(mass, 1.0, 1e-6);
      // Size-biased gamma mean 1 + (shape + 1) / shape * ratio; the mean-load
      // factor is its rounded coefficient.
      EXPECT_NEAR(mean, 1.0 + 4.5 / 3.5 * m.load_ratio(t), 1e-6 * mean);
      EXPECT_NEAR(m.mean_load(t), mean, 0.01 * mean);
    }
    double a = 0.0, b = 0.0;
    for (int n = 0; n < 20000; ++n) a += m.active_offloaded_pmf(n);
    for (int n = 1; n < 20000; ++n) b += m.active_offloaded_pmf_including_self(n);
    EXPECT_NEAR(a, 1.0, 1e-6);
    EXPECT_NEAR(b, 1.0, 1e-6);
  }
}

TEST(AssociationModel, InDofPmfHasTailAtU) {
  const AssociationModel m(test::fig2_config());
  for (int U = 0; U < 8; ++U) {
    double mass = 0.0;
    for (int u = 0; u <= U; ++u) mass += m.in_dof_pmf(u, U);
    EXPECT_NEAR(mass, 1.0, 1e-12);
    EXPECT_NEAR(m.in_dof_pmf(U, U), m.in_dof_tail(U), 1e-15);
    EXPECT_EQ(m.in_dof_pmf(U + 1, U), 0.0);
  }
}

TEST(AssociationModel, InSelectionProbabilityIsExpectedShare) {
  for (const NetworkConfig& c : {test::fig2_config(10.0), test::fig4_config(8, 6, 15.0)}) {
    const AssociationModel m(c);
    double previous = 0.0;
    EXPECT_EQ(m.in_selection_probability(0), 0.0);
    for (int U = 1; U < c.macro.antennas; ++U) {
      // E[min(1, U / N)] for N the active offloaded users sharing the macro.
      double ref = 0.0;
      for (int n = 1; n < 50000; ++n)
        ref += m.active_offloaded_pmf_including_self(n) * std::min(1.0, static_cast<double>(U) / n);
      const double p = m.in_selection_probability(U);
      EXPECT_NEAR(p, ref, 1e-9) << U;
      EXPECT_GE(p, previous);
      EXPECT_LE(p, 1.0);
      previous = p;
    }
  }
}

}  // namespace
}  // namespace hetnet
