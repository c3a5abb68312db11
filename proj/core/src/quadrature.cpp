#include "hetnet/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hetnet::math {
namespace {

// Kronrod 15-point nodes (nonnegative half) and weights; odd entries are the
// Gauss 7-point nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a;
  double b;
  std::vector<double> value;
  std::vector<double> error;
};

Interval evaluate(const VectorIntegrand& f, std::size_t dim, double a, double b,
                  std::vector<double>& scratch) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Interval iv{a, b, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  std::vector<double> gauss(dim, 0.0);
  std::span<double> fx(scratch.data(), dim);
  std::span<double> fy(scratch.data() + dim, dim);

  f(center, fx);
  for (std::size_t i = 0; i < dim; ++i) {
    iv.value[i] = kKronrodWeights[7] * fx[i];
    gauss[i] = kGaussWeights[3] * fx[i];
  }
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    f(center - dx, fx);
    f(center + dx, fy);
    for (std::size_t i = 0; i < dim; ++i) {
      const double pair = fx[i] + fy[i];
      iv.value[i] += kKronrodWeights[j] * pair;
      if (j % 2 == 1) gauss[i] += kGaussWeights[j / 2] * pair;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    iv.value[i] *= half;
    gauss[i] *= half;
    iv.error[i] = std::abs(iv.value[i] - gauss[i]);
  }
  return iv;
}

}  // namespace

QuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double a,
                                  double b, const QuadratureOptions& options) {
  if (dim == 0) throw std::invalid_argument("integrate_vector: dim must be > 0");
  if (options.tolerance.size() != 1 && options.tolerance.size() != dim)
    throw std::invalid_argument("integrate_vector: tolerance size must be 1 or dim");
  const auto tol_of = [&](std::size_t i) -> const ComponentTolerance& {
    return options.tolerance.size() == 1 ? options.tolerance[0] : options.tolerance[i];
  };

  QuadratureResult result;
  result.value.assign(dim, 0.0);
  result.error.assign(dim, 0.0);
  if (a == b) {
    result.converged = true;
    return result;
  }

  std::vector<double> scratch(2 * dim);
  std::vector<Interval> intervals;
  intervals.reserve(static_cast<std::size_t>(options.max_intervals) + 1);
  intervals.push_back(evaluate(f, dim, a, b, scratch));
  result.evaluations = 15;

  std::vector<double> allowed(dim);
  while (true) {
    std::fill(result.value.begin(), result.value.end(), 0.0);
    std::fill(result.error.begin(), result.error.end(), 0.0);
    for (const Interval& iv : intervals)
      for (std::size_t i = 0; i < dim; ++i) {
        result.value[i] += iv.value[i];
        result.error[i] += iv.error[i];
      }
    bool done = true;
    for (std::size_t i = 0; i < dim; ++i) {
      const ComponentTolerance& t = tol_of(i);
      allowed[i] = std::max(t.abs_tol, t.rel_tol * std::abs(result.value[i]));
      if (!(result.error[i] <= allowed[i])) done = false;
    }
    if (done) {
      result.converged = true;
      return result;
    }
    if (static_cast<int>(intervals.size()) >= options.max_intervals) return result;

    // Bisect the interval contributing the largest normalized error.
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      double score = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        score = std::max(score, intervals[k].error[i] / std::max(allowed[i], 1e-300));
      if (score > worst_score) {
        worst_score = score;
        worst = k;
      }
    }
    const Interval old = std::move(intervals[worst]);
    const double mid = 0.5 * (old.a + old.b);
    if (!(mid > old.a && mid < old.b)) return result;  // interval exhausted
    intervals[worst] = evaluate(f, dim, old.a, mid, scratch);
    intervals.push_back(evaluate(f, dim, mid, old.b, scratch));
    result.evaluations += 30;
  }
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_intervals) {
  QuadratureOptions options;
  options.tolerance = {ComponentTolerance{abs_tol, rel_tol}};
  options.max_intervals = max_intervals;
  return integrate_vector([&](double x, std::span<double> out) { out[0] = f(x); }, 1, a, b,
                          options);
}

}  // namespace hetnet::math
