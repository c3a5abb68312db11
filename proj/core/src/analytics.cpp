#include "hetnet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hetnet/diagnostics.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/special_math.hpp"

namespace hetnet {
namespace {

using std::numbers::pi;

constexpr double kDistanceCutoff = 41.5;  // in units of pi lambda r^2
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LaplaceArgs {
  double s = 0.0;
  double radius = 0.0;
};

// Single place mapping (class, interfering tier, distances) to the Laplace
// argument and exclusion radius. `y` is the serving distance; `x` is the
// nearest-macro distance of an offloaded user.
LaplaceArgs laplace_args(UserClass k, Tier j, double beta, double x, double y,
                         const NetworkConfig& cfg) {
  const TierParams& m = cfg.macro;
  const TierParams& p = cfg.pico;
  const double rho_j = cfg.tier(j).power;
  switch (k) {
    case UserClass::Macro: {
      const double s = beta * std::pow(y, m.pathloss) * rho_j / m.power;
      if (j == Tier::Macro) return {s, y};
      const double r = std::pow(p.power * cfg.bias / m.power, 1.0 / p.pathloss) *
                       std::pow(y, m.pathloss / p.pathloss);
      return {s, r};
    }
    case UserClass::PicoUnoffloaded: {
      const double s = beta * std::pow(y, p.pathloss) * rho_j / p.power;
      if (j == Tier::Pico) return {s, y};
      const double r = std::pow(m.power / p.power, 1.0 / m.pathloss) *
                       std::pow(y, p.pathloss / m.pathloss);
      return {s, r};
    }
    case UserClass::OffloadedIN:
    case UserClass::OffloadedNonIN: {
      const double s = beta * std::pow(y, p.pathloss) * rho_j / p.power;
      return {s, j == Tier::Macro ? x : y};
    }
  }
  return {};
}

// Fills d1[m] and d2[m] (m = 0..order) with the scaled Laplace derivatives of
// both tiers, each divided by m!.
void scaled_series(UserClass k, double beta, double x, double y, const NetworkConfig& cfg,
                   std::span<double> d1, std::span<double> d2) {
  const LaplaceArgs a1 = laplace_args(k, Tier::Macro, beta, x, y, cfg);
  const LaplaceArgs a2 = laplace_args(k, Tier::Pico, beta, x, y, cfg);
  math::laplace_derivatives_scaled(a1.s, a1.radius, cfg.macro, d1);
  math::laplace_derivatives_scaled(a2.s, a2.radius, cfg.pico, d2);
  double inv_fact = 1.0;
  for (std::size_t m = 0; m < d1.size(); ++m) {
    if (m > 0) inv_fact /= static_cast<double>(m);
    d1[m] *= inv_fact;
    d2[m] *= inv_fact;
  }
}

// sum_{n1 = 0..n} a[n1] b[n - n1]; with a, b already divided by factorials this
// is (1/n!) sum binom(n, n1) L~1^(n1) L~2^(n - n1).
double convolve(std::span<const double> a, std::span<const double> b, int n) {
  double sum = 0.0;
  for (int n1 = 0; n1 <= n; ++n1)
    sum += a[static_cast<std::size_t>(n1)] * b[static_cast<std::size_t>(n - n1)];
  return sum;
}

void require_converged(const math::QuadratureResult& r, const char* what) {
  if (r.converged) return;
  std::ostringstream msg;
  msg << what << ": adaptive integration did not reach the requested tolerance (err";
  for (double e : r.error) msg << ' ' << e;
  msg << ")";
  throw NumericAccuracyError(msg.str());
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

std::string_view to_string(UserClass k) {
  switch (k) {
    case UserClass::Macro:
      return "macro";
    case UserClass::PicoUnoffloaded:
      return "pico_unoffloaded";
    case UserClass::OffloadedIN:
      return "offloaded_in";
    case UserClass::OffloadedNonIN:
      return "offloaded_non_in";
  }
  return "unknown";
}

double sir_threshold(double spectral_efficiency) {
  return std::expm1(spectral_efficiency * std::numbers::ln2);
}

double OffloadedCoverage::coverage_in() const {
  return outage_in < 0.5 ? 1.0 - outage_in : covered_in;
}

double OffloadedCoverage::coverage_non_in() const {
  return outage_non_in < 0.5 ? 1.0 - outage_non_in : covered_non_in;
}

CoverageAnalyzer::CoverageAnalyzer(const NetworkConfig& cfg, AnalyticsOptions options)
    : model_(cfg), options_(options) {}

CoverageAnalyzer::CoverageAnalyzer(AssociationModel model, AnalyticsOptions options)
    : model_(std::move(model)), options_(options) {}

std::vector<double> CoverageAnalyzer::macro_terms(double beta) const {
  const NetworkConfig& cfg = config();
  const int n1 = cfg.macro.antennas;
  std::vector<double> terms(static_cast<std::size_t>(n1), 0.0);
  if (beta <= 0.0) {
    terms[0] = 1.0;
    return terms;
  }
  const double a_macro = model_.probabilities().macro;
  if (a_macro <= 0.0) return terms;

  const double c_pico = pi * cfg.pico.density *
                        std::pow(cfg.bias * cfg.pico.power / cfg.macro.power,
                                 2.0 / cfg.pico.pathloss);
  const double expo = 2.0 * cfg.macro.pathloss / cfg.pico.pathloss;

  math::QuadratureOptions qo;
  qo.max_intervals = options_.max_intervals;
  qo.tolerance.assign(static_cast<std::size_t>(n1),
                      {options_.term_abs_floor, options_.relative_tol});
  qo.tolerance[0] = {options_.coverage_abs_tol, options_.relative_tol};

  auto integrand = [&](double t, std::span<double> out) {
    const double y = std::sqrt(t / (pi * cfg.macro.density));
    const double weight = std::exp(-t - c_pico * std::pow(y, expo)) / a_macro;
    std::vector<double> d1(static_cast<std::size_t>(n1)), d2(static_cast<std::size_t>(n1));
    scaled_series(UserClass::Macro, beta, 0.0, y, cfg, d1, d2);
    for (int n = 0; n < n1; ++n) out[static_cast<std::size_t>(n)] = weight * convolve(d1, d2, n);
  };
  const auto r = math::integrate_vector(integrand, static_cast<std::size_t>(n1), 0.0,
                                        kDistanceCutoff, qo);
  require_converged(r, "macro_terms");
  return r.value;
}

double CoverageAnalyzer::pico_unoffloaded_coverage(double beta) const {
  if (beta <= 0.0) return 1.0;
  const NetworkConfig& cfg = config();
  const double a_pico = model_.probabilities().pico_unoffloaded;
  if (a_pico <= 0.0) return kNaN;
  const int n2 = cfg.pico.antennas;
  const double c_macro = pi * cfg.macro.density *
                         std::pow(cfg.macro.power / cfg.pico.power, 2.0 / cfg.macro.pathloss);
  const double expo = 2.0 * cfg.pico.pathloss / cfg.macro.pathloss;

  auto integrand = [&](double w) {
    const double y = std::sqrt(w / (pi * cfg.pico.density));
    const double weight = std::exp(-w - c_macro * std::pow(y, expo)) / a_pico;
    std::vector<double> d1(static_cast<std::size_t>(n2)), d2(static_cast<std::size_t>(n2));
    scaled_series(UserClass::PicoUnoffloaded, beta, 0.0, y, cfg, d1, d2);
    double sum = 0.0;
    for (int n = 0; n < n2; ++n) sum += convolve(d1, d2, n);
    return weight * sum;
  };
  const auto r = math::integrate(integrand, 0.0, kDistanceCutoff, options_.coverage_abs_tol,
                                 options_.relative_tol, options_.max_intervals);
  require_converged(r, "pico_unoffloaded_coverage");
  return std::clamp(r.value[0], 0.0, 1.0);
}

OffloadedCoverage CoverageAnalyzer::offloaded_coverage(double beta) const {
  OffloadedCoverage out;
  if (beta <= 0.0) {
    out.covered_in = out.covered_non_in = 1.0;
    return out;
  }
  const NetworkConfig& cfg = config();
  const double a_off = model_.probabilities().offloaded;
  if (a_off <= 0.0) {
    out.covered_in = out.covered_non_in = out.outage_in = out.outage_non_in = kNaN;
    return out;
  }
  const int n2 = cfg.pico.antennas;
  const double rho_ratio = cfg.macro.power / cfg.pico.power;

  // compositions3(n) for n < N2, built once per call.
  std::vector<std::vector<math::Composition3>> comps;
  comps.reserve(static_cast<std::size_t>(n2));
  for (int n = 0; n < n2; ++n) comps.push_back(math::compositions3(n));

  math::QuadratureOptions qo;
  qo.max_intervals = options_.max_intervals;
  const math::ComponentTolerance cov{options_.coverage_abs_tol, options_.relative_tol};
  const math::ComponentTolerance outage{options_.outage_abs_tol, options_.relative_tol};
  qo.tolerance = {cov, cov, outage, outage};
  math::QuadratureOptions inner_qo = qo;
  for (auto& t : inner_qo.tolerance) t.rel_tol *= 0.1;

  // Point integrand in (x, y): {cov_in, cov_non_in, out_in, out_non_in}.
  auto point = [&](double x, double y, std::span<double> v) {
    std::vector<double> a(static_cast<std::size_t>(n2)), b(static_cast<std::size_t>(n2));
    scaled_series(UserClass::OffloadedIN, beta, x, y, cfg, a, b);
    // Dominant (nearest) macro with exponential fading, divided by q!.
    const double c = beta * rho_ratio * std::pow(y, cfg.pico.pathloss) *
                     std::pow(x, -cfg.macro.pathloss);
    std::vector<double> d(static_cast<std::size_t>(n2));
    d[0] = 1.0 / (1.0 + c);
    for (int q = 1; q < n2; ++q) d[static_cast<std::size_t>(q)] = d[q - 1] * c / (1.0 + c);
    double cov_in = 0.0, cov_non = 0.0;
    for (int n = 0; n < n2; ++n) {
      cov_in += convolve(a, b, n);
      for (const auto& q : comps[static_cast<std::size_t>(n)])
        cov_non += a[static_cast<std::size_t>(q.q1)] * b[static_cast<std::size_t>(q.q2)] *
                   d[static_cast<std::size_t>(q.q3)];
    }
    v[0] = cov_in;
    v[1] = cov_non;
    v[2] = 1.0 - cov_in;
    v[3] = 1.0 - cov_non;
  };

  const double a1 = cfg.macro.pathloss;
  const double a2 = cfg.pico.pathloss;
  const double p21 = cfg.pico.power / cfg.macro.power;
  const double w_lo_coef = pi * cfg.pico.density * std::pow(p21, 2.0 / a2);
  const double w_hi_coef = pi * cfg.pico.density * std::pow(cfg.bias * p21, 2.0 / a2);

  bool inner_ok = true;
  auto outer = [&](double t, std::span<double> v) {
    const double x = std::sqrt(t / (pi * cfg.macro.density));
    const double xp = std::pow(x, 2.0 * a1 / a2);
    const double w_lo = w_lo_coef * xp;
    const double w_hi = std::min(w_hi_coef * xp, w_lo + kDistanceCutoff);
    if (!(w_hi > w_lo)) {
      std::fill(v.begin(), v.end(), 0.0);
      return;
    }
    // Inner variable: w - w_lo, so the weight e^-w factors as e^-w_lo e^-(w - w_lo).
    auto inner = [&](double dw, std::span<double> iv) {
      const double y = std::sqrt((w_lo + dw) / (pi * cfg.pico.density));
      point(x, y, iv);
      const double e = std::exp(-dw);
      for (double& val : iv) val *= e;
    };
    const auto r = math::integrate_vector(inner, 4, 0.0, w_hi - w_lo, inner_qo);
    if (!r.converged) inner_ok = false;
    const double weight = std::exp(-t - w_lo) / a_off;
    for (std::size_t i = 0; i < 4; ++i) v[i] = weight * r.value[i];
  };
  const auto r = math::integrate_vector(outer, 4, 0.0, kDistanceCutoff, qo);
  require_converged(r, "offloaded_coverage");
  if (!inner_ok) throw NumericAccuracyError("offloaded_coverage: inner integral did not converge");
  out.covered_in = std::clamp(r.value[0], 0.0, 1.0);
  out.covered_non_in = std::clamp(r.value[1], 0.0, 1.0);
  out.outage_in = std::clamp(r.value[2], 0.0, 1.0);
  out.outage_non_in = std::clamp(r.value[3], 0.0, 1.0);
  return out;
}

double CoverageAnalyzer::conditional_coverage(UserClass k, double beta, int U) const {
  if (beta < 0.0) throw std::domain_error("conditional_coverage: beta must be >= 0");
  if (U < 0 || U > config().macro.antennas - 1)
    throw std::domain_error("conditional_coverage: U must lie in [0, N1 - 1]");
  if (beta == 0.0) return 1.0;
  switch (k) {
    case UserClass::Macro: {
      const std::vector<double> terms = macro_terms(beta);
      const int n1 = config().macro.antennas;
      double s = 0.0;
      for (int u = 0; u <= U; ++u) {
        double partial = 0.0;
        for (int n = 0; n < n1 - u; ++n) partial += terms[static_cast<std::size_t>(n)];
        s += model_.in_dof_pmf(u, U) * partial;
      }
      return std::clamp(s, 0.0, 1.0);
    }
    case UserClass::PicoUnoffloaded:
      return pico_unoffloaded_coverage(beta);
    case UserClass::OffloadedIN:
      return offloaded_coverage(beta).coverage_in();
    case UserClass::OffloadedNonIN:
      return offloaded_coverage(beta).coverage_non_in();
  }
  return kNaN;
}

RatePieces CoverageAnalyzer::pieces(double tau, LoadModel model) const {
  return pieces_impl(tau, model, options_.n_max);
}

RatePieces CoverageAnalyzer::pieces_impl(double tau, LoadModel model, int n_max) const {
  if (tau < 0.0) throw std::domain_error("rate coverage: tau must be >= 0");
  if (n_max < 1) throw std::domain_error("rate coverage: n_max must be >= 1");
  const NetworkConfig& cfg = config();
  const int n1 = cfg.macro.antennas;
  RatePieces out;
  out.tau = tau;
  out.model = model;
  out.macro_terms.assign(static_cast<std::size_t>(n1), 0.0);
  out.has_offloaded = model_.probabilities().offloaded > 0.0;
  const double spectral = tau / cfg.bandwidth;

  if (model == LoadModel::MeanLoad) {
    const double beta1 = sir_threshold(model_.mean_load(Tier::Macro) * spectral);
    const double beta2 = sir_threshold(model_.mean_load(Tier::Pico) * spectral);
    out.macro_terms = macro_terms(beta1);
    out.pico_unoffloaded = pico_unoffloaded_coverage(beta2);
    if (out.has_offloaded) out.offloaded = offloaded_coverage(beta2);
    return out;
  }

  // Exact: sum over the load pmf. Once the conditional coverage is negligible
  // the remaining mass is credited to outage in full.
  constexpr double kNegligible = 1e-13;
  const double tail = options_.load_tail;

  {
    double mass = 0.0;
    int n = 1;
    for (; n <= n_max && mass < 1.0 - tail; ++n) {
      const double p = model_.load_pmf(Tier::Macro, n);
      mass += p;
      const auto terms = macro_terms(sir_threshold(n * spectral));
      double total = 0.0;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        out.macro_terms[i] += p * terms[i];
        total += terms[i];
      }
      if (total < kNegligible) {
        mass = 1.0;
        break;
      }
    }
    out.truncated_mass = std::max(out.truncated_mass, 1.0 - mass);
  }
  {
    double mass = 0.0;
    for (int n = 1; n <= n_max && mass < 1.0 - tail; ++n) {
      const double p = model_.load_pmf(Tier::Pico, n);
      mass += p;
      const double beta = sir_threshold(n * spectral);
      const double s2 = pico_unoffloaded_coverage(beta);
      double largest = std::isnan(s2) ? 0.0 : s2;
      out.pico_unoffloaded += p * s2;
      if (out.has_offloaded) {
        const OffloadedCoverage oc = offloaded_coverage(beta);
        out.offloaded.covered_in += p * oc.covered_in;
        out.offloaded.covered_non_in += p * oc.covered_non_in;
        out.offloaded.outage_in += p * oc.outage_in;
        out.offloaded.outage_non_in += p * oc.outage_non_in;
        largest = std::max({largest, oc.covered_in, oc.covered_non_in});
      }
      if (largest < kNegligible) {
        out.offloaded.outage_in += 1.0 - mass;
        out.offloaded.outage_non_in += 1.0 - mass;
        mass = 1.0;
        break;
      }
    }
    if (mass < 1.0) {
      out.offloaded.outage_in += 1.0 - mass;
      out.offloaded.outage_non_in += 1.0 - mass;
    }
    out.truncated_mass = std::max(out.truncated_mass, 1.0 - mass);
  }
  if (out.truncated_mass > tail) {
    std::ostringstream msg;
    msg << "rate_coverage_exact: load sum truncated at n_max = " << n_max
        << " with remaining pmf mass " << out.truncated_mass;
    emit_warning(msg.str());
  }
  return out;
}

CoverageBreakdown CoverageAnalyzer::assemble(const RatePieces& pieces, int U) const {
  const NetworkConfig& cfg = config();
  const int n1 = cfg.macro.antennas;
  if (U < 0 || U > n1 - 1) throw std::domain_error("rate coverage: U must lie in [0, N1 - 1]");
  const AssociationProbabilities& a = model_.probabilities();

  CoverageBreakdown out;
  out.truncated_mass = pieces.truncated_mass;
  double s1 = 0.0;
  for (int u = 0; u <= U; ++u) {
    double partial = 0.0;
    for (int n = 0; n < n1 - u; ++n) partial += pieces.macro_terms[static_cast<std::size_t>(n)];
    s1 += model_.in_dof_pmf(u, U) * partial;
  }
  out.per_class[index(UserClass::Macro)] = s1;
  out.per_class[index(UserClass::PicoUnoffloaded)] = pieces.pico_unoffloaded;
  const double pe = model_.in_selection_probability(U);
  out.weights[index(UserClass::Macro)] = a.macro;
  out.weights[index(UserClass::PicoUnoffloaded)] = a.pico_unoffloaded;
  out.weights[index(UserClass::OffloadedIN)] = a.offloaded * pe;
  out.weights[index(UserClass::OffloadedNonIN)] = a.offloaded * (1.0 - pe);
  if (pieces.has_offloaded) {
    out.per_class[index(UserClass::OffloadedIN)] = pieces.offloaded.coverage_in();
    out.per_class[index(UserClass::OffloadedNonIN)] = pieces.offloaded.coverage_non_in();
  } else {
    out.per_class[index(UserClass::OffloadedIN)] = kNaN;
    out.per_class[index(UserClass::OffloadedNonIN)] = kNaN;
  }
  out.total = 0.0;
  for (UserClass k : kUserClasses) {
    if (out.weight(k) == 0.0) continue;
    out.total += out.weight(k) * out.coverage(k);
  }
  return out;
}

RateCoverageDelta CoverageAnalyzer::delta(const RatePieces& pieces, int U) const {
  const int n1 = config().macro.antennas;
  if (U < 1 || U > n1 - 1)
    throw std::domain_error("delta_rate_coverage: U must lie in [1, N1 - 1]");
  const AssociationProbabilities& a = model_.probabilities();
  RateCoverageDelta d;
  // S_1(U) - S_1(U-1) = -Pr(U_{2Oa,0} >= U) * term[N1 - U].
  d.macro_change = model_.in_dof_tail(U) * pieces.macro_terms[static_cast<std::size_t>(n1 - U)];
  if (pieces.has_offloaded) {
    const double dpe =
        model_.in_selection_probability(U) - model_.in_selection_probability(U - 1);
    d.offloaded_change = dpe * (pieces.offloaded.outage_non_in - pieces.offloaded.outage_in);
  }
  d.gain = a.offloaded * d.offloaded_change;
  d.penalty = a.macro * d.macro_change;
  d.total = d.gain - d.penalty;
  return d;
}

std::vector<double> CoverageAnalyzer::objective_trace(const RatePieces& pieces) const {
  const int n1 = config().macro.antennas;
  std::vector<double> trace(static_cast<std::size_t>(n1));
  trace[0] = assemble(pieces, 0).total;
  for (int U = 1; U < n1; ++U)
    trace[static_cast<std::size_t>(U)] = trace[U - 1] + delta(pieces, U).total;
  return trace;
}

CoverageBreakdown CoverageAnalyzer::rate_coverage_exact(double tau, int U, int n_max) const {
  return assemble(pieces_impl(tau, LoadModel::Exact, n_max), U);
}

CoverageBreakdown CoverageAnalyzer::rate_coverage_exact(double tau, int U) const {
  return rate_coverage_exact(tau, U, options_.n_max);
}

CoverageBreakdown CoverageAnalyzer::rate_coverage_mla(double tau, int U) const {
  return assemble(pieces(tau, LoadModel::MeanLoad), U);
}

RateCoverageDelta CoverageAnalyzer::delta_rate_coverage(int U, double tau) const {
  return delta(pieces(tau, LoadModel::MeanLoad), U);
}

OrderSlopes CoverageAnalyzer::asymptotic_order_slopes(int U,
                                                      std::span<const double> tau_grid) const {
  if (tau_grid.size() < 2)
    throw std::domain_error("asymptotic_order_slopes: need at least two tau values");
  std::vector<double> lt, lg, lp;
  for (double tau : tau_grid) {
    const RateCoverageDelta d = delta_rate_coverage(U, tau);
    if (!(d.offloaded_change > 0.0) || !(d.macro_change > 0.0) ||
        !std::isfinite(d.offloaded_change) || !std::isfinite(d.macro_change)) {
      std::ostringstream msg;
      msg << "asymptotic_order_slopes: Delta R underflows at tau = " << tau
          << " (gain " << d.offloaded_change << ", penalty " << d.macro_change << ")";
      throw NumericAccuracyError(msg.str());
    }
    lt.push_back(std::log(tau));
    lg.push_back(std::log(d.offloaded_change));
    lp.push_back(std::log(d.macro_change));
  }
  return {least_squares_slope(lt, lg), least_squares_slope(lt, lp)};
}

double conditional_coverage(UserClass k, double beta, int U, const NetworkConfig& cfg) {
  return CoverageAnalyzer(cfg).conditional_coverage(k, beta, U);
}

CoverageBreakdown rate_coverage_exact(double tau, int U, const NetworkConfig& cfg, int n_max) {
  return CoverageAnalyzer(cfg).rate_coverage_exact(tau, U, n_max);
}

CoverageBreakdown rate_coverage_mla(double tau, int U, const NetworkConfig& cfg) {
  return CoverageAnalyzer(cfg).rate_coverage_mla(tau, U);
}

RateCoverageDelta delta_rate_coverage(int U, double tau, const NetworkConfig& cfg) {
  return CoverageAnalyzer(cfg).delta_rate_coverage(U, tau);
}

OrderSlopes asymptotic_order_slopes(int U, const NetworkConfig& cfg,
                                    std::span<const double> tau_grid) {
  return CoverageAnalyzer(cfg).asymptotic_order_slopes(U, tau_grid);
}

}  // namespace hetnet
