#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace hetnet::test {

/// Two-sided Kolmogorov-Smirnov statistic of `sample` against `cdf`.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic p-value with the Stephens small-sample correction.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// |p_hat - p| in units of the binomial standard error at p.
inline double binomial_z(std::int64_t hits, std::int64_t n, double p) {
  const double p_hat = static_cast<double>(hits) / static_cast<double>(n);
  const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) / static_cast<double>(n));
  return std::abs(p_hat - p) / se;
}

/// Number of partitions of m by the recurrence p(n, k) over the largest part.
inline std::int64_t partition_count(int m) {
  std::vector<std::int64_t> p(static_cast<std::size_t>(m) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= m; ++part)
    for (int n = part; n <= m; ++n) p[static_cast<std::size_t>(n)] += p[static_cast<std::size_t>(n - part)];
  return p[static_cast<std::size_t>(m)];
}

/// Bell numbers from the Bell triangle.
inline std::vector<double> bell_numbers(int max_n) {
  std::vector<double> bell{1.0};
  std::vector<double> row{1.0};
  for (int n = 1; n <= max_n; ++n) {
    std::vector<double> next{row.back()};
    for (double x : row) next.push_back(next.back() + x);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;
}

}  // namespace hetnet::test
