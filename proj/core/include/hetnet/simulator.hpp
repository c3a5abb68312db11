#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetnet/analytics.hpp"
#include "hetnet/network.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One sampled realization. The typical user sits at the origin and is
/// users[0]; every point lies within `window_radius` (users within
/// `user_radius`).
struct Deployment {
  std::vector<Point> macros;
  std::vector<Point> picos;
  std::vector<Point> users;
  double window_radius = 0.0;
  double user_radius = 0.0;
};

/// Poisson counts with means lambda pi R^2 and uniform placement in discs
/// centred on the origin. The typical user is prepended to the user points.
Deployment sample_deployment(const NetworkConfig& cfg, double window_radius, std::uint64_t seed,
                             double user_radius = 0.0);

/// Default window: max(5 / sqrt(pi lambda_1), 2000 m).
double default_window_radius(const NetworkConfig& cfg);

/// Association category of a user; the IN split of offloaded users depends on
/// the slot and lives in SlotSchedule.
enum class UserType { Macro = 0, PicoUnoffloaded = 1, Offloaded = 2 };

struct UserAssociation {
  Tier serving_tier = Tier::Macro;
  int serving = -1;        // index into macros or picos
  int nearest_macro = -1;  // index into macros
  int nearest_pico = -1;   // index into picos
  UserType type = UserType::Macro;
};

struct AssociationRealization {
  std::vector<UserAssociation> users;
  std::vector<std::vector<int>> macro_users;  // associated users per macro
  std::vector<std::vector<int>> pico_users;   // associated users per pico
  /// Offloaded users whose nearest macro is the given macro.
  std::vector<std::vector<int>> offloaded_by_macro;

  int load(Tier tier, int bs) const {
    return static_cast<int>((tier == Tier::Macro ? macro_users : pico_users)[bs].size());
  }
};

/// Biased association through nearest-BS lookups per tier; ties go to the
/// macro tier. Throws std::invalid_argument if a tier is empty.
AssociationRealization associate_and_classify(const Deployment& dep, const NetworkConfig& cfg);

struct SlotSchedule {
  /// Scheduled user per BS, -1 for a BS that serves a virtual user.
  std::vector<int> macro_scheduled;
  std::vector<int> pico_scheduled;
  /// Active offloaded users per macro, in uniformly random order; the first
  /// min(U, size) of them are the IN targets.
  std::vector<std::vector<int>> active_offloaded;

  int in_dof_used(int macro, int U) const;
  bool is_in_target(int macro, int user, int U) const;
};

/// Uniform TDMA scheduling, conditioned on `forced_user` (the typical user)
/// being scheduled by its serving BS.
SlotSchedule schedule_slot(const AssociationRealization& ar, Rng& rng, int forced_user = 0);

enum class Fidelity { Fast, Full };

/// IN with design parameter U, or ABS with offloaded-user fraction eta.
struct SchemeSpec {
  enum class Variant { IN, ABS };
  Variant variant = Variant::IN;
  int in_dof = 0;
  double abs_fraction = 0.5;

  static SchemeSpec in(int U) { return {Variant::IN, U, 0.0}; }
  static SchemeSpec abs(double eta) { return {Variant::ABS, 0, eta}; }
};

struct SimulationOptions {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  Fidelity fidelity = Fidelity::Fast;
  double window_radius = 0.0;  // 0 selects default_window_radius
  /// Users are drawn in a disc of radius max(x0, y0) + factor / sqrt(pi lambda_1)
  /// around the typical user (x0, y0: its nearest macro and pico distances).
  double user_disc_factor = 3.0;
  unsigned threads = 1;
};

/// Everything one trial contributes. SIR values for every U come from the same
/// channel and geometry draws.
struct TrialRecord {
  UserType type = UserType::Macro;
  int load = 1;                // L_0, typical user included
  int abs_load = 1;            // sub-load sharing the ABS resource with u_0
  int active_offloaded = 0;    // U_{2Oa,0} (macro) or U^_{2Oa,0} (offloaded)
  int in_rank = -1;            // offloaded: position in the nearest macro's IN order
  double macro_distance = 0.0;
  double pico_distance = 0.0;
  double sir_nulled = 0.0;     // offloaded: SIR without the nearest macro
  double sir_unnulled = 0.0;   // offloaded: SIR with the nearest macro at cfg.in_dof
  double sir_abs = 0.0;
  double max_nulled_gain = 0.0;  // Full fidelity: largest |g^H f|^2 towards an IN target
  bool window_guard = false;     // third-nearest macro beyond half the window
  bool disc_boundary = false;    // a relevant cell reaches the user-disc edge
};

struct SimulationDiagnostics {
  double window_guard_fraction = 0.0;
  double disc_boundary_fraction = 0.0;
  double max_nulled_gain = 0.0;
};

class InsufficientWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-trial records of one simulation run; coverage for any scheme and any
/// tau is read off these with common random numbers.
class TrialSet {
 public:
  TrialSet(NetworkConfig cfg, SimulationOptions options, std::vector<TrialRecord> records,
           std::vector<double> sir_in);

  const NetworkConfig& config() const { return cfg_; }
  const SimulationOptions& options() const { return options_; }
  std::size_t size() const { return records_.size(); }
  const TrialRecord& record(std::size_t i) const { return records_[i]; }
  std::span<const TrialRecord> records() const { return records_; }
  /// SIR of trial i under IN with design parameter U.
  double sir(std::size_t i, int U) const;
  SimulationDiagnostics diagnostics() const;

  /// Rate of trial i under the given scheme.
  double rate(std::size_t i, const SchemeSpec& scheme) const;
  bool covered(std::size_t i, const SchemeSpec& scheme, double tau) const;
  /// Class of trial i under `scheme` (offloaded users split by IN selection).
  UserClass user_class(std::size_t i, const SchemeSpec& scheme) const;

  /// Fraction of covered trials.
  double coverage(const SchemeSpec& scheme, double tau) const;

 private:
  NetworkConfig cfg_;
  SimulationOptions options_;
  std::vector<TrialRecord> records_;
  std::vector<double> sir_in_;  // trials x N1
};

/// Runs options.trials independent trials. Throws InsufficientWindowError
/// when the window guard trips in more than 1% of trials.
TrialSet simulate_trials(const NetworkConfig& cfg, const SimulationOptions& options);

struct CoverageEstimate {
  std::int64_t covered = 0;
  std::int64_t trials = 0;
  double value = 0.0;
  Interval ci;
};

struct CoverageReport {
  SchemeSpec scheme;
  std::vector<double> tau;
  std::vector<CoverageEstimate> total;
  /// Conditional coverage per user class; index with index(UserClass).
  std::array<std::vector<CoverageEstimate>, 4> per_class;
  /// All offloaded users together (both IN outcomes).
  std::vector<CoverageEstimate> offloaded;
  std::array<std::int64_t, 4> class_counts{};
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  Fidelity fidelity = Fidelity::Fast;
  SimulationDiagnostics diagnostics;
};

CoverageReport coverage_report(const TrialSet& set, const SchemeSpec& scheme,
                               std::span<const double> tau_grid);

CoverageReport estimate_rate_coverage(const NetworkConfig& cfg, const SchemeSpec& scheme,
                                      std::span<const double> tau_grid, std::int64_t trials,
                                      std::uint64_t seed, Fidelity fidelity = Fidelity::Fast);

/// One line per trial: trial,type,class,load,sir,rate under `scheme`.
void write_realization_dump(std::ostream& out, const TrialSet& set, const SchemeSpec& scheme);

std::string_view to_string(UserType t);
std::string_view to_string(Fidelity f);

}  // namespace hetnet
