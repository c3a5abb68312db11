#include "hetnet/special_math.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hetnet::math {
namespace {

constexpr double kZFloor = 1e-300;

void check_beta_args(double a, double b) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::domain_error("upper_incomplete_beta: a must be > 0, got " + std::to_string(a));
  if (!(b > 0.0) || !std::isfinite(b))
    throw std::domain_error("upper_incomplete_beta: b must be > 0, got " + std::to_string(b));
}

std::vector<Partition> build_partitions(int m) {
  std::vector<Partition> out;
  if (m == 0) {
    out.push_back(Partition{{}, 1.0});
    return out;
  }
  // Descending-parts enumeration; each partition is converted to multiplicities.
  std::vector<int> parts{m};
  while (true) {
    Partition p;
    p.multiplicity.assign(static_cast<std::size_t>(m), 0);
    for (int part : parts) ++p.multiplicity[static_cast<std::size_t>(part - 1)];
    long double coef = 1.0L;
    for (int k = 2; k <= m; ++k) coef *= k;
    for (int mult : p.multiplicity)
      for (int k = 2; k <= mult; ++k) coef /= k;
    p.coefficient = static_cast<double>(coef);
    out.push_back(std::move(p));

    // Next partition: find the rightmost part > 1.
    int remainder = 0;
    while (!parts.empty() && parts.back() == 1) {
      parts.pop_back();
      ++remainder;
    }
    if (parts.empty()) break;
    const int k = --parts.back();
    ++remainder;
    while (remainder > k) {
      parts.push_back(k);
      remainder -= k;
    }
    if (remainder > 0) parts.push_back(remainder);
  }
  return out;
}

struct PartitionCache {
  std::vector<std::vector<Partition>> table;
  PartitionCache() {
    table.reserve(kPartitionCacheLimit + 1);
    for (int m = 0; m <= kPartitionCacheLimit; ++m) table.push_back(build_partitions(m));
  }
};

const PartitionCache& partition_cache() {
  static const PartitionCache cache;
  return cache;
}

// Upper-tail argument of the Laplace integrals: returns B'(a, b, 1/(1 + x)).
double beta_tail(double a, double b, double x) {
  if (std::isinf(x)) return upper_incomplete_beta(a, b, kZFloor);
  const double w = x / (1.0 + x);
  if (w < 0.5) return upper_incomplete_beta_complement(a, b, w);
  return upper_incomplete_beta(a, b, std::max(1.0 / (1.0 + x), kZFloor));
}

double exclusion_ratio(double s, double r, double alpha) {
  if (r <= 0.0) return std::numeric_limits<double>::infinity();
  return s * std::pow(r, -alpha);
}

}  // namespace

double upper_incomplete_beta(double a, double b, double z) {
  check_beta_args(a, b);
  if (!(z > 0.0 && z < 1.0))
    throw std::domain_error("upper_incomplete_beta: z must lie in (0, 1), got " +
                            std::to_string(z));
  return boost::math::betac(a, b, z);
}

double upper_incomplete_beta_complement(double a, double b, double w) {
  check_beta_args(a, b);
  if (!(w > 0.0 && w < 1.0))
    throw std::domain_error("upper_incomplete_beta_complement: w must lie in (0, 1), got " +
                            std::to_string(w));
  // integral_0^w t^(b-1) (1-t)^(a-1) dt
  return boost::math::beta(b, a, w);
}

const std::vector<Partition>& integer_partitions(int m) {
  if (m < 0) throw std::domain_error("integer_partitions: m must be >= 0");
  if (m <= kPartitionCacheLimit) return partition_cache().table[static_cast<std::size_t>(m)];
  thread_local std::vector<Partition> scratch;
  scratch = build_partitions(m);
  return scratch;
}

std::vector<Composition3> compositions3(int n) {
  if (n < 0) throw std::domain_error("compositions3: n must be >= 0");
  std::vector<Composition3> out;
  out.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
  for (int q1 = n; q1 >= 0; --q1)
    for (int q2 = n - q1; q2 >= 0; --q2) out.push_back({q1, q2, n - q1 - q2});
  return out;
}

double laplace_interference(double s, double r, const TierParams& tier) {
  if (s < 0.0 || r < 0.0) throw std::domain_error("laplace_interference: s and r must be >= 0");
  if (s == 0.0) return 1.0;
  const double delta = 2.0 / tier.pathloss;
  const double x = exclusion_ratio(s, r, tier.pathloss);
  const double exponent = 2.0 * std::numbers::pi * tier.density / tier.pathloss *
                          std::pow(s, delta) * beta_tail(delta, 1.0 - delta, x);
  return std::exp(-exponent);
}

void laplace_derivatives_scaled(double s, double r, const TierParams& tier,
                                std::span<double> out) {
  if (out.empty()) return;
  const int max_order = static_cast<int>(out.size()) - 1;
  if (!(s > 0.0)) {
    // Every derivative term carries s^(2/alpha) and vanishes at s = 0.
    out[0] = 1.0;
    for (int m = 1; m <= max_order; ++m) out[static_cast<std::size_t>(m)] = 0.0;
    return;
  }
  const double delta = 2.0 / tier.pathloss;
  const double x = exclusion_ratio(s, r, tier.pathloss);
  const double scale = 2.0 * std::numbers::pi * tier.density / tier.pathloss * std::pow(s, delta);
  const double base = std::exp(-scale * beta_tail(delta, 1.0 - delta, x));

  // Per-part factors for a = 1..max_order.
  std::array<double, kPartitionCacheLimit + 1> factor_buf{};
  std::vector<double> factor_heap;
  std::span<double> factor;
  if (max_order <= kPartitionCacheLimit) {
    factor = std::span<double>(factor_buf.data(), static_cast<std::size_t>(max_order) + 1);
  } else {
    factor_heap.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
    factor = factor_heap;
  }
  for (int a = 1; a <= max_order; ++a)
    factor[static_cast<std::size_t>(a)] = scale * beta_tail(1.0 + delta, a - delta, x);

  out[0] = base;
  for (int m = 1; m <= max_order; ++m) {
    double sum = 0.0;
    for (const Partition& p : integer_partitions(m)) {
      double term = p.coefficient;
      for (int a = 1; a <= m; ++a) {
        const int mult = p.multiplicity[static_cast<std::size_t>(a - 1)];
        for (int k = 0; k < mult; ++k) term *= factor[static_cast<std::size_t>(a)];
      }
      sum += term;
    }
    out[static_cast<std::size_t>(m)] = base * sum;
  }
}

double laplace_derivative_scaled(int m, double s, double r, const TierParams& tier) {
  if (m < 0) throw std::domain_error("laplace_derivative_scaled: m must be >= 0");
  if (!(s > 0.0)) throw std::domain_error("laplace_derivative_scaled: s must be > 0");
  if (r < 0.0) throw std::domain_error("laplace_derivative_scaled: r must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  laplace_derivatives_scaled(s, r, tier, out);
  return out.back();
}

double factorial(int n) {
  if (n < 0 || n > 170) throw std::domain_error("factorial: n out of range");
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

}  // namespace hetnet::math
