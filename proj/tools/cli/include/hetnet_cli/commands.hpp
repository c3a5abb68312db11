#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hetnet_cli/config.hpp"
#include "hetnet_cli/output.hpp"

namespace hetnet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumeric = 2,
  kExitWindow = 3,
  kExitValidation = 4,
  kExitInternal = 5,
};

/// Thrown by `validate` when the cross-check exceeds its tolerance.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void run_analytic(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);
void run_simulate(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);
void run_optimize_u(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);
void run_optimize_abs(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);
void run_sweep_bias(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);
void run_validate(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out);

/// Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetnet::cli
