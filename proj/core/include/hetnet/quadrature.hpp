#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hetnet::math {

/// Per-component tolerance of the vector integrator: component i is accepted
/// once its error estimate is below max(abs_tol[i], rel_tol[i] * |value[i]|).
struct ComponentTolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
};

struct QuadratureOptions {
  std::vector<ComponentTolerance> tolerance;  // one per component, or one for all
  int max_intervals = 400;
};

struct QuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  bool converged = false;
};

/// f(x, out) writes every integrand component at x into out.
using VectorIntegrand = std::function<void(double, std::span<double>)>;

/// Globally adaptive Gauss-Kronrod (7/15 point) integration of a
/// vector-valued integrand over [a, b]. All components share the abscissae;
/// the interval with the largest normalized error is bisected until every
/// component meets its tolerance or `max_intervals` is exhausted.
QuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double a,
                                  double b, const QuadratureOptions& options);

/// Scalar convenience wrapper.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_intervals = 400);

}  // namespace hetnet::math
