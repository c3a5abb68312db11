#include "hetnet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hetnet/diagnostics.hpp"

namespace hetnet {
namespace {

OptimizationResult argmax_over_u(std::vector<double> trace, Engine engine) {
  OptimizationResult r;
  r.engine = engine;
  std::size_t best = 0;
  for (std::size_t u = 1; u < trace.size(); ++u)
    if (trace[u] > trace[best]) best = u;
  r.argmax = static_cast<double>(best);
  r.value = trace[best];
  for (std::size_t u = 0; u < trace.size(); ++u) r.grid.push_back(static_cast<double>(u));
  r.trace = std::move(trace);
  return r;
}

void require_positive_tau(double tau) {
  if (!(tau > 0.0)) throw std::domain_error("optimizer: tau must be > 0");
}

// Largest drop below an earlier value on the way up to the peak, and largest
// rise after it.
bool unimodal_within(const std::vector<double>& f, std::size_t peak, double tol) {
  double running = f.front();
  for (std::size_t i = 0; i <= peak; ++i) {
    if (running - f[i] > tol) return false;
    running = std::max(running, f[i]);
  }
  running = f.back();
  for (std::size_t i = f.size(); i-- > peak;) {
    if (running - f[i] > tol) return false;
    running = std::max(running, f[i]);
  }
  return true;
}

}  // namespace

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::AnalyticMla:
      return "analytic-mla";
    case Engine::AnalyticExact:
      return "analytic-exact";
    case Engine::MonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

std::string_view to_string(SweepScheme s) {
  switch (s) {
    case SweepScheme::InOptimal:
      return "in";
    case SweepScheme::NoIn:
      return "u0";
    case SweepScheme::AbsOptimal:
      return "abs";
  }
  return "unknown";
}

OptimizationResult optimal_in_dof(double tau, const CoverageAnalyzer& analyzer, LoadModel model) {
  require_positive_tau(tau);
  return argmax_over_u(analyzer.objective_trace(analyzer.pieces(tau, model)),
                       model == LoadModel::MeanLoad ? Engine::AnalyticMla : Engine::AnalyticExact);
}

OptimizationResult optimal_in_dof(double tau, const TrialSet& trials) {
  require_positive_tau(tau);
  std::vector<double> trace;
  for (int U = 0; U < trials.config().macro.antennas; ++U)
    trace.push_back(trials.coverage(SchemeSpec::in(U), tau));
  return argmax_over_u(std::move(trace), Engine::MonteCarlo);
}

OptimizationResult optimal_in_dof(double tau, const NetworkConfig& cfg,
                                  const OptimizerOptions& options) {
  switch (options.engine) {
    case Engine::AnalyticMla:
      return optimal_in_dof(tau, CoverageAnalyzer(cfg, options.analytics), LoadModel::MeanLoad);
    case Engine::AnalyticExact:
      return optimal_in_dof(tau, CoverageAnalyzer(cfg, options.analytics), LoadModel::Exact);
    case Engine::MonteCarlo:
      return optimal_in_dof(tau, simulate_trials(cfg, options.simulation));
  }
  throw std::invalid_argument("optimal_in_dof: unknown engine");
}

AsymptoticCheck verify_asymptotic_optimum(const NetworkConfig& cfg,
                                          std::span<const double> tau_sequence,
                                          const AnalyticsOptions& options) {
  if (tau_sequence.size() < 2)
    throw std::domain_error("verify_asymptotic_optimum: need at least two tau values");
  for (std::size_t i = 1; i < tau_sequence.size(); ++i)
    if (!(tau_sequence[i] < tau_sequence[i - 1]))
      throw std::domain_error("verify_asymptotic_optimum: tau sequence must be decreasing");

  // Below this |Delta R| the sign of a difference is no longer trustworthy.
  constexpr double kResolution = 1e-15;
  const CoverageAnalyzer analyzer(cfg, options);
  const int n1 = cfg.macro.antennas;
  AsymptoticCheck check;
  for (double tau : tau_sequence) {
    const RatePieces pieces = analyzer.pieces(tau, LoadModel::MeanLoad);
    const OptimizationResult r = argmax_over_u(analyzer.objective_trace(pieces), Engine::AnalyticMla);
    const int u_star = static_cast<int>(r.argmax);
    check.tau.push_back(tau);
    check.optimum.push_back(u_star);
    for (int U : {u_star, u_star + 1}) {
      if (U < 1 || U > n1 - 1) continue;
      if (std::abs(analyzer.delta(pieces, U).total) < kResolution) check.conclusive = false;
    }
  }
  const std::size_t tail = std::max<std::size_t>(2, (check.optimum.size() + 1) / 2);
  const int last = check.optimum.back();
  check.stabilized = check.conclusive &&
                     std::all_of(check.optimum.end() - static_cast<std::ptrdiff_t>(tail),
                                 check.optimum.end(), [&](int u) { return u == last; });
  check.limit = check.stabilized ? last : -1;
  const int n2 = cfg.pico.antennas;
  const int lo = std::max(0, n1 - n2 - 1);
  const int hi = std::max(0, n1 - n2);
  check.holds = check.stabilized && (last == lo || last == hi);
  return check;
}

OptimizationResult optimal_abs_fraction(double tau, const TrialSet& trials, int iterations) {
  require_positive_tau(tau);
  if (iterations == 0) iterations = trials.config().macro.antennas;
  if (iterations < 1) throw std::domain_error("optimal_abs_fraction: iterations must be >= 1");
  const auto objective = [&](double eta) { return trials.coverage(SchemeSpec::abs(eta), tau); };

  OptimizationResult r;
  r.engine = Engine::MonteCarlo;
  for (int k = 1; k <= 99; ++k) {
    const double eta = 0.01 * k;
    r.grid.push_back(eta);
    r.trace.push_back(objective(eta));
  }

  // Golden-section search; on ties the bracket moves towards smaller eta.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  double best = fc >= fd ? c : d;
  double best_value = std::max(fc, fd);
  for (int it = 1; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
    for (auto [x, fx] : {std::pair{c, fc}, std::pair{d, fd}}) {
      if (fx > best_value || (fx == best_value && x < best)) {
        best = x;
        best_value = fx;
      }
    }
  }

  const auto peak = static_cast<std::size_t>(
      std::max_element(r.trace.begin(), r.trace.end()) - r.trace.begin());
  // Statistical resolution of a proportion estimated from n trials.
  const double tol = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(trials.size(), 1)));
  r.unimodal = unimodal_within(r.trace, peak, tol);
  if (!r.unimodal || best_value < r.trace[peak] - tol) {
    std::ostringstream msg;
    msg << "optimal_abs_fraction: objective is not unimodal at tau = " << tau
        << "; using the grid argmax eta = " << r.grid[peak];
    emit_warning(msg.str());
    r.unimodal = false;
    r.argmax = r.grid[peak];
    r.value = r.trace[peak];
  } else {
    r.argmax = best;
    r.value = best_value;
  }
  return r;
}

OptimizationResult optimal_abs_fraction(double tau, const NetworkConfig& cfg,
                                        const SimulationOptions& simulation, int iterations) {
  return optimal_abs_fraction(tau, simulate_trials(cfg, simulation), iterations);
}

const SweepPoint& BiasSweep::best(SweepScheme s) const {
  const SweepPoint* out = nullptr;
  for (const SweepPoint& p : points) {
    if (p.scheme != s) continue;
    if (!out || p.total.value > out->total.value) out = &p;
  }
  if (!out) throw std::invalid_argument("BiasSweep::best: scheme not in sweep");
  return *out;
}

BiasSweep bias_sweep(double tau, const NetworkConfig& cfg, std::span<const double> bias_db,
                     const SimulationOptions& options, std::span<const SweepScheme> schemes) {
  require_positive_tau(tau);
  if (bias_db.empty()) throw ConfigError("sweep.bias_db", "grid must not be empty");
  if (schemes.empty()) throw ConfigError("sweep.schemes", "must not be empty");
  BiasSweep sweep;
  sweep.tau = tau;
  sweep.schemes.assign(schemes.begin(), schemes.end());
  const double taus[] = {tau};
  for (double b_db : bias_db) {
    if (!(b_db >= 0.0)) throw ConfigError("sweep.bias_db", "values must be >= 0 dB");
    NetworkConfig c = cfg;
    c.bias = db_to_linear(b_db);
    c.in_dof = 0;
    const TrialSet trials = simulate_trials(c, options);
    for (SweepScheme s : schemes) {
      SweepPoint p;
      p.bias_db = b_db;
      p.scheme = s;
      SchemeSpec spec = SchemeSpec::in(0);
      if (s == SweepScheme::InOptimal) {
        p.parameter = optimal_in_dof(tau, trials).argmax;
        spec = SchemeSpec::in(static_cast<int>(p.parameter));
      } else if (s == SweepScheme::AbsOptimal) {
        p.parameter = optimal_abs_fraction(tau, trials).argmax;
        spec = SchemeSpec::abs(p.parameter);
      }
      const CoverageReport rep = coverage_report(trials, spec, taus);
      p.total = rep.total[0];
      p.macro = rep.per_class[index(UserClass::Macro)][0];
      p.pico_unoffloaded = rep.per_class[index(UserClass::PicoUnoffloaded)][0];
      p.offloaded = rep.offloaded[0];
      sweep.points.push_back(p);
    }
  }
  return sweep;
}

}  // namespace hetnet
