#pragma once

#include <array>
#include <span>
#include <vector>

#include "hetnet/network.hpp"

namespace hetnet::math {

/// B'(a, b, z) = integral over [z, 1] of u^(a-1) (1-u)^(b-1) du.
///
/// Requires a > 0, b > 0 and 0 < z < 1; anything else is a domain error.
double upper_incomplete_beta(double a, double b, double z);

/// Same integral, parameterized by w = 1 - z so callers that know 1 - z
/// exactly (z close to 1) keep full relative precision. Requires 0 < w < 1.
double upper_incomplete_beta_complement(double a, double b, double w);

/// Multiplicity vector (p_1, ..., p_m) with sum a * p_a = m. Entry a-1 holds
/// p_a; the vector has length m (empty for m = 0).
struct Partition {
  std::vector<int> multiplicity;
  /// m! / prod p_a!, exact for m <= 20 and correctly rounded beyond.
  double coefficient = 1.0;
};

/// All partitions of m, duplicate free, in reverse lexicographic order of the
/// parts. Results for m <= kPartitionCacheLimit are built once and shared.
const std::vector<Partition>& integer_partitions(int m);

inline constexpr int kPartitionCacheLimit = 32;

struct Composition3 {
  int q1 = 0;
  int q2 = 0;
  int q3 = 0;
  friend bool operator==(const Composition3&, const Composition3&) = default;
};

/// Every ordered triple of nonnegative integers summing to n.
std::vector<Composition3> compositions3(int n);

/// Laplace transform of the tier interference from BSs beyond radius r, with
/// unit-mean exponential fading:
///   exp(-(2 pi lambda / alpha) s^(2/alpha) B'(2/alpha, 1 - 2/alpha, 1/(1 + s r^-alpha))).
/// r = 0 is accepted (the full Beta function).
double laplace_interference(double s, double r, const TierParams& tier);

/// (-s)^m d^m/ds^m of laplace_interference, assembled from the partition sum
/// over integer_partitions(m). Every summand is nonnegative.
double laplace_derivative_scaled(int m, double s, double r, const TierParams& tier);

/// laplace_derivative_scaled for every order 0..max_order at once; the per-part
/// factors are shared between orders. out.size() must be max_order + 1.
void laplace_derivatives_scaled(double s, double r, const TierParams& tier,
                                std::span<double> out);

/// Exact n! as double (n <= 170).
double factorial(int n);

/// Binomial coefficient as double, exact for the small arguments used here.
double binomial(int n, int k);

}  // namespace hetnet::math
