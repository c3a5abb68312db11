#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "hetnet/analytics.hpp"
#include "reference_configs.hpp"

namespace hetnet {
namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 2 * integral over u > t of u / (1 + u^alpha / beta).
double rho(double beta, double t, double alpha) {
  boost::math::quadrature::exp_sinh<double> q;
  return 2.0 * q.integrate([&](double u) { return u / (1.0 + std::pow(u, alpha) / beta); }, t, kInf,
                           1e-13);
}

// Single-antenna network with a common path-loss exponent.
NetworkConfig single_antenna(double bias_db) {
  NetworkConfig c = test::fig2_config(bias_db);
  c.macro.antennas = 1;
  c.pico.antennas = 1;
  c.in_dof = 0;
  return c;
}

TEST(ConditionalCoverage, SingleAntennaMacroClosedForm) {
  const NetworkConfig c = single_antenna(6.0);
  const CoverageAnalyzer an(c);
  const double alpha = 4.0, d = 0.5;
  const double a1 = an.association().probabilities().macro;
  const double ratio = c.pico.power / c.macro.power;
  for (double beta : {0.05, 0.5, 1.0, 4.0, 30.0}) {
    const double denom = c.macro.density * (1 + rho(beta, 1.0, alpha)) +
                         c.pico.density * std::pow(ratio, d) *
                             (std::pow(c.bias, d) + rho(beta, std::pow(c.bias, 1 / alpha), alpha));
    const double ref = c.macro.density / (a1 * denom);
    EXPECT_NEAR(an.conditional_coverage(UserClass::Macro, beta, 0), ref, 1e-7) << beta;
  }
}

TEST(ConditionalCoverage, SingleAntennaPicoClosedForm) {
  const CoverageAnalyzer an(single_antenna(6.0));
  for (double beta : {0.05, 0.5, 1.0, 4.0, 30.0})
    EXPECT_NEAR(an.conditional_coverage(UserClass::PicoUnoffloaded, beta, 0),
                1.0 / (1.0 + rho(beta, 1.0, 4.0)), 1e-7)
        << beta;
}

// Double integral over the offloading strip with independent nearest-distance
// densities; the nearest macro either is nulled or interferes with Exp(1) gain.
// For alpha = 4 the macro interference beyond x has the closed form
// pi lambda sqrt(s) (pi / 2 - atan(x^2 / sqrt(s))).
double offloaded_oracle(const NetworkConfig& c, double beta, bool nulled) {
  const double alpha = 4.0;
  const double a_off = association_probabilities(c).offloaded;
  const double r_lo = std::pow(c.pico.power / c.macro.power, 1 / alpha);
  const double r_hi = std::pow(c.bias * c.pico.power / c.macro.power, 1 / alpha);
  const double pico_term = rho(beta, 1.0, alpha);
  using boost::math::quadrature::gauss_kronrod;
  const auto outer = [&](double x) {
    if (x <= 0.0) return 0.0;
    const auto inner = [&](double y) {
      const double s = beta * std::pow(y, alpha) * c.macro.power / c.pico.power;
      const double rs = std::sqrt(s);
      const double macro_exp = pi * c.macro.density * rs * (pi / 2 - std::atan(x * x / rs));
      double v = std::exp(-macro_exp - pi * c.pico.density * y * y * (1 + pico_term));
      if (!nulled) v /= 1.0 + s * std::pow(x, -alpha);
      return 2 * pi * c.pico.density * y * v;
    };
    const double iy = gauss_kronrod<double, 31>::integrate(inner, r_lo * x, r_hi * x, 8, 1e-12);
    return 2 * pi * c.macro.density * x * std::exp(-pi * c.macro.density * x * x) * iy;
  };
  // exp(-pi lambda_1 x^2) is below 1e-40 beyond x = 550 m.
  return gauss_kronrod<double, 61>::integrate(outer, 0.0, 550.0, 12, 1e-11) / a_off;
}

TEST(ConditionalCoverage, SingleAntennaOffloadedDoubleIntegral) {
  const NetworkConfig c = single_antenna(8.0);
  const CoverageAnalyzer an(c);
  for (double beta : {0.1, 1.0, 5.0}) {
    EXPECT_NEAR(an.conditional_coverage(UserClass::OffloadedIN, beta, 0),
                offloaded_oracle(c, beta, true), 2e-6)
        << beta;
    EXPECT_NEAR(an.conditional_coverage(UserClass::OffloadedNonIN, beta, 0),
                offloaded_oracle(c, beta, false), 2e-6)
        << beta;
  }
}

TEST(ConditionalCoverage, OrderingProperties) {
  const CoverageAnalyzer an(test::fig2_config(5.0));
  double prev_macro = 1.0;
  for (double beta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double in = an.conditional_coverage(UserClass::OffloadedIN, beta, 4);
    const double non = an.conditional_coverage(UserClass::OffloadedNonIN, beta, 4);
    EXPECT_GT(in, non);
    const double macro = an.conditional_coverage(UserClass::Macro, beta, 0);
    EXPECT_LE(macro, prev_macro);
    prev_macro = macro;
    for (int U = 1; U < 8; ++U)
      EXPECT_LE(an.conditional_coverage(UserClass::Macro, beta, U),
                an.conditional_coverage(UserClass::Macro, beta, U - 1) + 1e-12);
    for (UserClass k : kUserClasses) {
      const double v = an.conditional_coverage(k, beta, 4);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_EQ(an.conditional_coverage(UserClass::Macro, 0.0, 3), 1.0);
  EXPECT_THROW(an.conditional_coverage(UserClass::Macro, 1.0, 8), std::domain_error);
  EXPECT_THROW(an.conditional_coverage(UserClass::Macro, -1.0, 0), std::domain_error);
}

TEST(RateCoverage, BreakdownIsConsistent) {
  const CoverageAnalyzer an(test::fig2_config(5.0));
  for (LoadModel model : {LoadModel::MeanLoad, LoadModel::Exact}) {
    const RatePieces p = an.pieces(1e6, model);
    for (int U = 0; U < 8; ++U) {
      const CoverageBreakdown b = an.assemble(p, U);
      double wsum = 0.0, total = 0.0;
      for (UserClass k : kUserClasses) {
        wsum += b.weight(k);
        if (b.weight(k) > 0) total += b.weight(k) * b.coverage(k);
      }
      EXPECT_NEAR(wsum, 1.0, 1e-9);
      EXPECT_NEAR(b.total, total, 1e-12);
      EXPECT_GE(b.total, 0.0);
      EXPECT_LE(b.total, 1.0);
    }
    EXPECT_EQ(an.assemble(p, 0).weight(UserClass::OffloadedIN), 0.0);
  }
}

TEST(RateCoverage, TraceAndDeltasAgreeWithAssembly) {
  const CoverageAnalyzer an(test::fig3_config(4.6));
  for (double tau : {1e3, 1e5, 2e6}) {
    const RatePieces p = an.pieces(tau, LoadModel::MeanLoad);
    const std::vector<double> trace = an.objective_trace(p);
    ASSERT_EQ(trace.size(), 5u);
    for (int U = 0; U < 5; ++U) EXPECT_NEAR(trace[U], an.assemble(p, U).total, 1e-12);
    for (int U = 1; U < 5; ++U) {
      const RateCoverageDelta d = an.delta(p, U);
      EXPECT_NEAR(d.total, d.gain - d.penalty, 1e-15);
      EXPECT_NEAR(d.total, an.assemble(p, U).total - an.assemble(p, U - 1).total, 1e-12);
      EXPECT_GE(d.gain, 0.0);
      EXPECT_GE(d.penalty, 0.0);
    }
  }
}

TEST(RateCoverage, DecreasesWithRateThreshold) {
  const CoverageAnalyzer an(test::fig2_config(5.0));
  double prev_mla = 1.0, prev_exact = 1.0;
  for (double tau : {1e4, 1e5, 1e6, 5e6, 2e7}) {
    const double mla = an.rate_coverage_mla(tau, 4).total;
    const double exact = an.rate_coverage_exact(tau, 4).total;
    EXPECT_LE(mla, prev_mla);
    EXPECT_LE(exact, prev_exact);
    prev_mla = mla;
    prev_exact = exact;
  }
}

TEST(RateCoverage, FigureTwoReferenceValues) {
  // Frozen from this implementation after the Monte Carlo cross-check
  // (2000 trials agreed to within 0.003 at every point).
  const CoverageAnalyzer an(test::fig2_config(5.0));
  EXPECT_NEAR(an.rate_coverage_exact(1e6, 4).total, 0.68564, 1e-4);
  EXPECT_NEAR(an.rate_coverage_mla(1e6, 4).total, 0.67629, 1e-4);
  EXPECT_NEAR(an.rate_coverage_mla(5e6, 4).total, 0.02738, 1e-4);
  EXPECT_LT(std::abs(an.rate_coverage_exact(1e5, 4).total - an.rate_coverage_mla(1e5, 4).total), 0.05);
}

TEST(RateCoverage, OrderSlopesNearZero) {
  const NetworkConfig c = test::fig3_config(4.6);
  const CoverageAnalyzer an(c);
  const double grid[] = {1e2, 3e2, 1e3, 3e3, 1e4};
  for (int U : {1, 2, 3}) {
    const OrderSlopes s = an.asymptotic_order_slopes(U, grid);
    EXPECT_NEAR(s.gain, c.pico.antennas, 0.2) << U;
    EXPECT_NEAR(s.penalty, c.macro.antennas - U, 0.2) << U;
  }
  const double bad[] = {1e3};
  EXPECT_THROW(an.asymptotic_order_slopes(2, bad), std::domain_error);
}

TEST(RateCoverage, FreeFunctionsMatchAnalyzer) {
  const NetworkConfig c = test::fig3_config(2.5);
  const CoverageAnalyzer an(c);
  EXPECT_EQ(rate_coverage_mla(1e4, 2, c).total, an.rate_coverage_mla(1e4, 2).total);
  EXPECT_EQ(delta_rate_coverage(2, 1e4, c).total, an.delta_rate_coverage(2, 1e4).total);
  EXPECT_EQ(conditional_coverage(UserClass::Macro, 0.3, 1, c),
            an.conditional_coverage(UserClass::Macro, 0.3, 1));
  EXPECT_NEAR(sir_threshold(1.0), 1.0, 0.0);
  EXPECT_NEAR(sir_threshold(0.5), std::sqrt(2.0) - 1.0, 1e-15);
}

}  // namespace
}  // namespace hetnet
