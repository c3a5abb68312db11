#include "hetnet/association.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hetnet/diagnostics.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {
namespace {

using std::numbers::pi;

// Upper limit of t = pi lambda r^2; e^-t is far below 1e-14 of its peak there.
constexpr double kDistanceCutoff = 41.5;

double integrate_probability(const std::function<double(double)>& f, const char* what) {
  const auto r = math::integrate(f, 0.0, kDistanceCutoff, 1e-14, 1e-12, 2000);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "association_probabilities: " << what << " integral did not converge (err "
        << r.error[0] << ")";
    throw NumericAccuracyError(msg.str());
  }
  return r.value[0];
}

double macro_distance(double t, const NetworkConfig& cfg) {
  return std::sqrt(t / (pi * cfg.macro.density));
}

double pico_distance(double w, const NetworkConfig& cfg) {
  return std::sqrt(w / (pi * cfg.pico.density));
}

}  // namespace

OffloadStrip offload_strip(double x, const NetworkConfig& cfg) {
  const double a1 = cfg.macro.pathloss;
  const double a2 = cfg.pico.pathloss;
  const double ratio = cfg.pico.power / cfg.macro.power;
  const double xr = std::pow(x, a1 / a2);
  return {std::pow(ratio, 1.0 / a2) * xr, std::pow(cfg.bias * ratio, 1.0 / a2) * xr};
}

AssociationProbabilities association_probabilities(const NetworkConfig& cfg) {
  validate_tier(cfg.macro, "network.macro");
  validate_tier(cfg.pico, "network.pico");
  if (!(cfg.bias >= 1.0)) throw ConfigError("network.bias", "must be >= 1 (0 dB)");

  const double l1 = cfg.macro.density;
  const double l2 = cfg.pico.density;
  const double a1 = cfg.macro.pathloss;
  const double a2 = cfg.pico.pathloss;
  const double p21 = cfg.pico.power / cfg.macro.power;

  AssociationProbabilities out;
  // Macro-user: no pico within (B P2/P1)^(1/a2) x^(a1/a2).
  const double c_macro = pi * l2 * std::pow(cfg.bias * p21, 2.0 / a2);
  out.macro = integrate_probability(
      [&](double t) {
        const double x = macro_distance(t, cfg);
        return std::exp(-t - c_macro * std::pow(x, 2.0 * a1 / a2));
      },
      "macro");

  // Unoffloaded pico-user: no macro within (P1/P2)^(1/a1) y^(a2/a1).
  const double c_pico = pi * l1 * std::pow(1.0 / p21, 2.0 / a1);
  out.pico_unoffloaded = integrate_probability(
      [&](double w) {
        const double y = pico_distance(w, cfg);
        return std::exp(-w - c_pico * std::pow(y, 2.0 * a2 / a1));
      },
      "unoffloaded");

  // Offloaded: nearest pico inside the strip.
  if (cfg.bias > 1.0) {
    const double c_lo = pi * l2 * std::pow(p21, 2.0 / a2);
    const double c_span = c_macro - c_lo;
    out.offloaded = integrate_probability(
        [&](double t) {
          const double x = macro_distance(t, cfg);
          const double xp = std::pow(x, 2.0 * a1 / a2);
          return std::exp(-t - c_lo * xp) * -std::expm1(-c_span * xp);
        },
        "offloaded");
  }
  return out;
}

double serving_distance_density(ServingClass cls, double y, const NetworkConfig& cfg,
                                const AssociationProbabilities& probs) {
  if (y < 0.0) return 0.0;
  const double l1 = cfg.macro.density;
  const double l2 = cfg.pico.density;
  const double a1 = cfg.macro.pathloss;
  const double a2 = cfg.pico.pathloss;
  const double p21 = cfg.pico.power / cfg.macro.power;
  if (cls == ServingClass::Macro) {
    if (probs.macro <= 0.0) return 0.0;
    return 2.0 * pi * l1 * y / probs.macro *
           std::exp(-pi * l1 * y * y -
                    pi * l2 * std::pow(cfg.bias * p21, 2.0 / a2) * std::pow(y, 2.0 * a1 / a2));
  }
  if (probs.pico_unoffloaded <= 0.0) return 0.0;
  return 2.0 * pi * l2 * y / probs.pico_unoffloaded *
         std::exp(-pi * l2 * y * y -
                  pi * l1 * std::pow(1.0 / p21, 2.0 / a1) * std::pow(y, 2.0 * a2 / a1));
}

double joint_distance_density(double x, double y, const NetworkConfig& cfg,
                              const AssociationProbabilities& probs) {
  if (x < 0.0 || y < 0.0 || probs.offloaded <= 0.0) return 0.0;
  const OffloadStrip strip = offload_strip(x, cfg);
  if (y < strip.lower || y >= strip.upper) return 0.0;
  const double l1 = cfg.macro.density;
  const double l2 = cfg.pico.density;
  return (2.0 * pi * l1 * x * std::exp(-pi * l1 * x * x)) *
         (2.0 * pi * l2 * y * std::exp(-pi * l2 * y * y)) / probs.offloaded;
}

double gamma_count_pmf(int k, double ratio, double shape, int extra) {
  if (k < 0) return 0.0;
  if (ratio <= 0.0) return k == 0 ? 1.0 : 0.0;
  const double r = shape + extra;
  const double log_pmf = std::lgamma(k + r) - std::lgamma(k + 1.0) - std::lgamma(r) +
                         k * std::log(ratio / (ratio + shape)) +
                         r * std::log(shape / (ratio + shape));
  return std::exp(log_pmf);
}

int pmf_support_bound(double ratio, double shape, int extra, double tail, int cap) {
  double cumulative = 0.0;
  int k = 0;
  while (k < cap) {
    cumulative += gamma_count_pmf(k, ratio, shape, extra);
    ++k;
    if (cumulative >= 1.0 - tail) break;
  }
  return k;
}

AssociationModel::AssociationModel(NetworkConfig cfg)
    : cfg_(std::move(cfg)), probs_(association_probabilities(cfg_)) {}

AssociationModel::AssociationModel(NetworkConfig cfg, AssociationProbabilities probs)
    : cfg_(std::move(cfg)), probs_(probs) {}

AssociationStats AssociationModel::stats() const {
  AssociationStats s;
  s.probs = probs_;
  s.pr_in_selected = in_selection_probability(cfg_.in_dof);
  s.mean_load_macro = mean_load(Tier::Macro);
  s.mean_load_pico = mean_load(Tier::Pico);
  return s;
}

double AssociationModel::load_ratio(Tier tier) const {
  const double a = tier == Tier::Macro ? probs_.macro : probs_.pico();
  return cfg_.user_density * a / cfg_.tier(tier).density;
}

double AssociationModel::load_pmf(Tier tier, int n) const {
  if (n < 1) return 0.0;
  return gamma_count_pmf(n - 1, load_ratio(tier), cfg_.load_shape, 1);
}

double AssociationModel::mean_load(Tier tier) const {
  return 1.0 + cfg_.mean_load_factor * load_ratio(tier);
}

double AssociationModel::offloaded_ratio() const {
  const double a2 = probs_.pico();
  if (a2 <= 0.0) return 0.0;
  return cfg_.pico.density * probs_.offloaded / (a2 * cfg_.macro.density);
}

double AssociationModel::active_offloaded_pmf(int n) const {
  return gamma_count_pmf(n, offloaded_ratio(), cfg_.load_shape, 0);
}

double AssociationModel::active_offloaded_pmf_including_self(int n) const {
  if (n < 1) return 0.0;
  return gamma_count_pmf(n - 1, offloaded_ratio(), cfg_.load_shape, 1);
}

double AssociationModel::in_dof_tail(int U) const {
  double head = 0.0;
  for (int n = 0; n < U; ++n) head += active_offloaded_pmf(n);
  return 1.0 - head;
}

double AssociationModel::in_dof_pmf(int u, int U) const {
  if (u < 0 || u > U) return 0.0;
  if (u < U) return active_offloaded_pmf(u);
  return in_dof_tail(U);
}

double AssociationModel::in_selection_probability(int U) const {
  if (U <= 0) return 0.0;
  const double nu = offloaded_ratio();
  const double shape = cfg_.load_shape;
  // E[1 / U^] = (1/nu) (1 - (1 + nu/shape)^-shape); tends to 1 as nu -> 0.
  const double inv_mean =
      nu > 0.0 ? -std::expm1(-shape * std::log1p(nu / shape)) / nu : 1.0;
  double value = U * inv_mean;
  for (int n = 1; n <= U; ++n) {
    const double p = active_offloaded_pmf_including_self(n);
    value += p - static_cast<double>(U) / n * p;
  }
  const double clamped = std::clamp(value, 0.0, 1.0);
  if (std::abs(clamped - value) > 1e-9) {
    std::ostringstream msg;
    msg << "in_selection_probability(U=" << U << ") = " << value << " clamped to [0, 1]";
    emit_warning(msg.str());
  }
  return clamped;
}

}  // namespace hetnet
