#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/network.hpp"

namespace hetnet {

/// User classes of the nulling scheme: macro-users, unoffloaded pico-users,
/// offloaded users selected for nulling, and offloaded users left un-nulled.
enum class UserClass { Macro = 0, PicoUnoffloaded = 1, OffloadedIN = 2, OffloadedNonIN = 3 };

inline constexpr std::array<UserClass, 4> kUserClasses = {
    UserClass::Macro, UserClass::PicoUnoffloaded, UserClass::OffloadedIN,
    UserClass::OffloadedNonIN};

std::string_view to_string(UserClass k);

inline constexpr std::size_t index(UserClass k) { return static_cast<std::size_t>(k); }

/// Total rate coverage with its decomposition: total = sum weights[k] * per_class[k].
/// Classes with zero weight (no offloaded users) carry NaN per-class values.
struct CoverageBreakdown {
  double total = 0.0;
  std::array<double, 4> per_class{};
  std::array<double, 4> weights{};
  /// Load pmf mass beyond the truncation point (exact engine only).
  double truncated_mass = 0.0;

  double coverage(UserClass k) const { return per_class[index(k)]; }
  double weight(UserClass k) const { return weights[index(k)]; }
};

/// Delta R(U) = R(U) - R(U-1) split into the offloaded-user gain and the
/// macro-user penalty; total == gain - penalty.
struct RateCoverageDelta {
  double total = 0.0;
  double gain = 0.0;
  double penalty = 0.0;
  /// Un-weighted pieces: Delta R_2O (> 0) and |Delta R_1|.
  double offloaded_change = 0.0;
  double macro_change = 0.0;
};

struct OrderSlopes {
  double gain = 0.0;
  double penalty = 0.0;
};

enum class LoadModel { Exact, MeanLoad };

struct AnalyticsOptions {
  double coverage_abs_tol = 1e-7;  // coverage-type integrals
  double relative_tol = 1e-6;      // outage and per-order terms
  double term_abs_floor = 1e-28;
  double outage_abs_tol = 1e-14;  // 1 - coverage carries ~1e-16 rounding noise
  double load_tail = 1e-6;  // pmf mass left out of the exact load sum
  int n_max = 10000;
  int max_intervals = 400;
};

/// Offloaded-class functionals at one SIR threshold. Coverage and outage are
/// integrated in the same pass; outage is evaluated pointwise as
/// 1 - (coverage integrand) and stays accurate when it is tiny.
struct OffloadedCoverage {
  double covered_in = 0.0;
  double covered_non_in = 0.0;
  double outage_in = 0.0;
  double outage_non_in = 0.0;

  double coverage_in() const;
  double coverage_non_in() const;
};

/// Class-level pieces of R(tau), averaged over the load distribution. Every
/// value of U is assembled from the same pieces.
struct RatePieces {
  double tau = 0.0;
  LoadModel model = LoadModel::MeanLoad;
  std::vector<double> macro_terms;  // per-order terms of S_1, n = 0..N1-1
  double pico_unoffloaded = 0.0;
  OffloadedCoverage offloaded;
  bool has_offloaded = false;
  double truncated_mass = 0.0;
};

/// Evaluates the conditional coverage functionals S_k and the rate coverage
/// built on them. Pure and const; safe to share across threads.
class CoverageAnalyzer {
 public:
  explicit CoverageAnalyzer(const NetworkConfig& cfg, AnalyticsOptions options = {});
  CoverageAnalyzer(AssociationModel model, AnalyticsOptions options);

  const AssociationModel& association() const { return model_; }
  const NetworkConfig& config() const { return model_.config(); }
  const AnalyticsOptions& options() const { return options_; }

  /// term[n], n = 0..N1-1, of the macro-user functional at threshold beta; S_1
  /// for nulling DoF u is sum_{n < N1 - u} term[n].
  std::vector<double> macro_terms(double beta) const;
  double pico_unoffloaded_coverage(double beta) const;
  OffloadedCoverage offloaded_coverage(double beta) const;

  /// S_k(beta) for the given design parameter U (only S_1 depends on U).
  double conditional_coverage(UserClass k, double beta, int U) const;

  RatePieces pieces(double tau, LoadModel model) const;
  CoverageBreakdown assemble(const RatePieces& pieces, int U) const;
  RateCoverageDelta delta(const RatePieces& pieces, int U) const;
  /// R(U) for U = 0..N1-1, built as R(0) plus cumulative deltas.
  std::vector<double> objective_trace(const RatePieces& pieces) const;

  CoverageBreakdown rate_coverage_exact(double tau, int U, int n_max) const;
  CoverageBreakdown rate_coverage_exact(double tau, int U) const;
  CoverageBreakdown rate_coverage_mla(double tau, int U) const;
  RateCoverageDelta delta_rate_coverage(int U, double tau) const;
  OrderSlopes asymptotic_order_slopes(int U, std::span<const double> tau_grid) const;

 private:
  RatePieces pieces_impl(double tau, LoadModel model, int n_max) const;

  AssociationModel model_;
  AnalyticsOptions options_;
};

/// f(x) = 2^x - 1, the SIR threshold for spectral efficiency x.
double sir_threshold(double spectral_efficiency);

// Free-function spellings of the analyzer operations.
double conditional_coverage(UserClass k, double beta, int U, const NetworkConfig& cfg);
CoverageBreakdown rate_coverage_exact(double tau, int U, const NetworkConfig& cfg,
                                      int n_max = 10000);
CoverageBreakdown rate_coverage_mla(double tau, int U, const NetworkConfig& cfg);
RateCoverageDelta delta_rate_coverage(int U, double tau, const NetworkConfig& cfg);
OrderSlopes asymptotic_order_slopes(int U, const NetworkConfig& cfg,
                                    std::span<const double> tau_grid);

}  // namespace hetnet
