#pragma once

#include <vector>

#include "hetnet/network.hpp"

namespace hetnet {

/// Probabilities that the typical user is a macro-user, an unoffloaded
/// pico-user, or an offloaded user.
struct AssociationProbabilities {
  double macro = 0.0;
  double pico_unoffloaded = 0.0;
  double offloaded = 0.0;

  double pico() const { return pico_unoffloaded + offloaded; }
};

/// Integrates the nearest-distance forms of the three association regions.
/// A_offloaded is integrated directly over the offloading strip.
AssociationProbabilities association_probabilities(const NetworkConfig& cfg);

enum class ServingClass { Macro, PicoUnoffloaded };

/// Serving-distance density conditioned on the class (macro-users or
/// unoffloaded pico-users). `probs` must come from association_probabilities.
double serving_distance_density(ServingClass cls, double y, const NetworkConfig& cfg,
                                const AssociationProbabilities& probs);

/// Joint density of (nearest-macro distance x, serving-pico distance y) for
/// offloaded users; zero outside the strip
///   (P2/P1)^(1/a2) x^(a1/a2) <= y < (B P2/P1)^(1/a2) x^(a1/a2).
double joint_distance_density(double x, double y, const NetworkConfig& cfg,
                              const AssociationProbabilities& probs);

/// Lower and upper boundary of the offloading strip for a given x.
struct OffloadStrip {
  double lower = 0.0;
  double upper = 0.0;
};
OffloadStrip offload_strip(double x, const NetworkConfig& cfg);

/// Scalar ingredients derived once per configuration.
struct AssociationStats {
  AssociationProbabilities probs;
  double pr_in_selected = 0.0;
  double mean_load_macro = 1.0;
  double mean_load_pico = 1.0;
};

/// Immutable bundle of every association-level quantity for one config.
/// Probabilities are computed on construction; pmfs are closed form.
class AssociationModel {
 public:
  explicit AssociationModel(NetworkConfig cfg);
  AssociationModel(NetworkConfig cfg, AssociationProbabilities probs);

  const NetworkConfig& config() const { return cfg_; }
  const AssociationProbabilities& probabilities() const { return probs_; }
  AssociationStats stats() const;

  /// Pr(L_{0,j} = n), n >= 1, under the gamma cell-size approximation.
  double load_pmf(Tier tier, int n) const;
  /// 1 + 1.28 lambda_u A_j / lambda_j (the factor is cfg.mean_load_factor).
  double mean_load(Tier tier) const;
  /// Ratio lambda_u A_j / lambda_j.
  double load_ratio(Tier tier) const;

  /// nu = lambda_2 A_offloaded / (A_pico lambda_1).
  double offloaded_ratio() const;
  /// Pr(U_{2Oa,0} = n), n >= 0: active offloaded users of the typical
  /// macro-user's serving macro.
  double active_offloaded_pmf(int n) const;
  /// Pr(U^_{2Oa,0} = n), n >= 1: active offloaded users (the typical one
  /// included) of an offloaded typical user's nearest macro.
  double active_offloaded_pmf_including_self(int n) const;

  /// Pr(u_{2OC,0} = u) for 0 <= u <= U; the u = U entry is the tail.
  double in_dof_pmf(int u, int U) const;
  /// 1 - sum_{n < U} Pr(U_{2Oa,0} = n).
  double in_dof_tail(int U) const;

  /// Pr(E_{2OC,0}): probability that an offloaded typical user is selected
  /// for nulling. Clamped to [0, 1].
  double in_selection_probability(int U) const;

 private:
  NetworkConfig cfg_;
  AssociationProbabilities probs_;
};

/// Pr(K = k) for K ~ NegBin(shape + extra, ratio / (ratio + shape)).
///
/// With extra = 1 this is the size-biased cell form used for the load of the
/// typical user's cell (count k = n - 1) and for U^_{2Oa,0}; with extra = 0 it
/// is the form used for U_{2Oa,0}. ratio = 0 gives a point mass at k = 0.
double gamma_count_pmf(int k, double ratio, double shape, int extra);

/// Smallest N such that sum_{k<N} pmf(k) >= 1 - tail, capped at `cap`.
int pmf_support_bound(double ratio, double shape, int extra, double tail = 1e-9,
                      int cap = 10000);

}  // namespace hetnet
