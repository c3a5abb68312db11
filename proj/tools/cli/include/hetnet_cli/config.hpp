#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetnet/analytics.hpp"
#include "hetnet/network.hpp"
#include "hetnet/optimizer.hpp"
#include "hetnet/simulator.hpp"

namespace hetnet::cli {

using Json = nlohmann::ordered_json;

struct AnalysisSettings {
  std::vector<double> tau;
  std::vector<int> in_dof;  // empty: network.in_dof only
  std::vector<LoadModel> load_models = {LoadModel::Exact, LoadModel::MeanLoad};
  AnalyticsOptions numerics;
  unsigned threads = 1;
};

struct SimulationSettings {
  SimulationOptions options;
  SchemeSpec scheme;  // IN at network.in_dof unless overridden
  bool dump_realizations = false;
};

struct SweepSettings {
  double tau = 0.0;
  std::vector<double> bias_db;
  std::vector<SweepScheme> schemes{kSweepSchemes.begin(), kSweepSchemes.end()};
};

struct OptimizeSettings {
  Engine engine = Engine::AnalyticMla;
  int abs_iterations = 0;  // 0: N1 bracket reductions
};

struct ValidateSettings {
  std::vector<double> tau;  // empty: analysis.tau
  double tolerance = 0.03;
};

struct ExperimentConfig {
  NetworkConfig network;
  AnalysisSettings analysis;
  SimulationSettings simulation;
  SweepSettings sweep;
  OptimizeSettings optimize;
  ValidateSettings validate;
  std::string out_dir = ".";
  /// The document as given (after overrides); parsing it again reproduces the
  /// experiment.
  Json input;
  /// Every setting after defaults and unit conversion.
  Json resolved;
};

/// Applies a dotted-path override ("network.bias_db=10"). The value is parsed
/// as JSON and taken verbatim as a string if that fails.
void apply_override(Json& doc, std::string_view assignment);

/// Parses and validates a configuration document. Unknown keys, conflicting
/// unit spellings and invalid values throw ConfigError naming the key.
ExperimentConfig parse_config(const Json& doc);

Json load_config_file(const std::string& path);

/// Expands {"start", "stop", "count", "spacing": "log" | "linear"} or a plain
/// array into a list of values.
std::vector<double> expand_grid(const Json& node, const std::string& key);

std::string_view to_string(LoadModel m);

}  // namespace hetnet::cli
