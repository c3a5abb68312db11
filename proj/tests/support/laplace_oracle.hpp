#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "hetnet/network.hpp"

namespace hetnet::test {

/// -log of the interference Laplace transform by direct integration of
/// 2 pi lambda v (1 - 1 / (1 + s v^-alpha)) over v > r.
inline double laplace_exponent_direct(double s, double r, const TierParams& tier) {
  if (s == 0.0) return 0.0;
  const double alpha = tier.pathloss;
  // Work in u = v / s^(1/alpha) so the integrand is O(1) near its knee.
  const double scale = std::pow(s, 1.0 / alpha);
  const auto f = [alpha](double u) { return u / (1.0 + std::pow(u, alpha)); };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral =
      integrator.integrate(f, r / scale, std::numeric_limits<double>::infinity(), 1e-14);
  return 2.0 * std::numbers::pi * tier.density * scale * scale * integral;
}

inline double laplace_direct(double s, double r, const TierParams& tier) {
  return std::exp(-laplace_exponent_direct(s, r, tier));
}

/// (-s)^m d^m/ds^m of the direct-integral transform for m = 1, 2, from
/// five-point central differences of the exponent.
inline double laplace_derivative_fd(int m, double s, double r, const TierParams& tier) {
  const double h = 1e-3 * s;
  const auto E = [&](double x) { return laplace_exponent_direct(x, r, tier); };
  const double e_m2 = E(s - 2 * h), e_m1 = E(s - h), e0 = E(s), e_p1 = E(s + h), e_p2 = E(s + 2 * h);
  const double d1 = (e_m2 - 8 * e_m1 + 8 * e_p1 - e_p2) / (12 * h);
  const double d2 = (-e_m2 + 16 * e_m1 - 30 * e0 + 16 * e_p1 - e_p2) / (12 * h * h);
  const double L = std::exp(-e0);
  if (m == 1) return s * d1 * L;
  return s * s * (d1 * d1 - d2) * L;
}

}  // namespace hetnet::test
