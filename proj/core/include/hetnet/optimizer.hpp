#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "hetnet/analytics.hpp"
#include "hetnet/simulator.hpp"

namespace hetnet {

enum class Engine { AnalyticMla, AnalyticExact, MonteCarlo };

std::string_view to_string(Engine e);

struct OptimizationResult {
  double argmax = 0.0;
  double value = 0.0;
  std::vector<double> grid;
  std::vector<double> trace;  // objective at every grid point
  Engine engine = Engine::AnalyticMla;
  /// False when the scalar search met a non-unimodal trace and fell back to
  /// the grid argmax.
  bool unimodal = true;
};

struct OptimizerOptions {
  Engine engine = Engine::AnalyticMla;
  AnalyticsOptions analytics;
  SimulationOptions simulation;
};

/// U* = argmax over U in {0, ..., N1 - 1}; ties go to the smaller U.
OptimizationResult optimal_in_dof(double tau, const NetworkConfig& cfg,
                                  const OptimizerOptions& options = {});
OptimizationResult optimal_in_dof(double tau, const CoverageAnalyzer& analyzer, LoadModel model);
OptimizationResult optimal_in_dof(double tau, const TrialSet& trials);

struct AsymptoticCheck {
  bool holds = false;       // stabilized with limit in the predicted set
  bool stabilized = false;
  bool conclusive = true;   // false if Delta R fell below numerical resolution
  int limit = -1;
  std::vector<double> tau;
  std::vector<int> optimum;  // U*(tau) along the sequence
};

/// Evaluates U*(tau) with the mean-load objective along a decreasing tau
/// sequence and checks that it settles in {N1 - N2 - 1, N1 - N2} (clamped to
/// the valid range). "Settled" means constant over the trailing half of the
/// sequence.
AsymptoticCheck verify_asymptotic_optimum(const NetworkConfig& cfg,
                                          std::span<const double> tau_sequence,
                                          const AnalyticsOptions& options = {});

/// eta* in (0, 1) by golden-section search over the Monte Carlo ABS objective
/// with `iterations` bracket reductions (0 selects N1). The trace covers
/// eta = 0.01, 0.02, ..., 0.99.
OptimizationResult optimal_abs_fraction(double tau, const TrialSet& trials, int iterations = 0);
OptimizationResult optimal_abs_fraction(double tau, const NetworkConfig& cfg,
                                        const SimulationOptions& simulation, int iterations = 0);

enum class SweepScheme { InOptimal, NoIn, AbsOptimal };
inline constexpr std::array<SweepScheme, 3> kSweepSchemes = {
    SweepScheme::InOptimal, SweepScheme::NoIn, SweepScheme::AbsOptimal};
std::string_view to_string(SweepScheme s);

struct SweepPoint {
  double bias_db = 0.0;
  SweepScheme scheme = SweepScheme::InOptimal;
  double parameter = 0.0;  // U* or eta*; 0 for NoIn
  CoverageEstimate total;
  CoverageEstimate macro;
  CoverageEstimate pico_unoffloaded;
  CoverageEstimate offloaded;
};

struct BiasSweep {
  double tau = 0.0;
  std::vector<SweepPoint> points;  // bias-major, schemes in request order
  std::vector<SweepScheme> schemes;

  /// Point at B*_scheme (largest total coverage; ties to the smaller B).
  const SweepPoint& best(SweepScheme s) const;
};

/// Monte Carlo bias sweep. Every bias value reuses options.seed, so the
/// schemes and bias values share random numbers wherever they can.
BiasSweep bias_sweep(double tau, const NetworkConfig& cfg, std::span<const double> bias_db,
                     const SimulationOptions& options,
                     std::span<const SweepScheme> schemes = kSweepSchemes);

}  // namespace hetnet
