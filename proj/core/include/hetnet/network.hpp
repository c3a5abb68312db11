#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hetnet {

/// Per-tier deployment parameters.
///
/// `power` doubles as the transmit SNR: thermal noise is ignored throughout,
/// so only the ratio between the two tiers ever enters a result.
struct TierParams {
  double density = 0.0;   // BSs per m^2
  double pathloss = 4.0;  // exponent, > 2
  double power = 1.0;     // linear
  int antennas = 1;
};

enum class Tier { Macro = 1, Pico = 2 };

/// Two-tier network description. The macro tier has bias 1; the pico tier
/// has bias `bias` (linear).
struct NetworkConfig {
  TierParams macro;
  TierParams pico;
  double user_density = 0.0;  // users per m^2
  double bias = 1.0;          // linear, >= 1
  double bandwidth = 10e6;    // Hz
  int in_dof = 0;             // U in [0, N1 - 1]

  // Shape of the gamma cell-size approximation and the size-biased mean-load
  // factor that goes with it.
  double load_shape = 3.5;
  double mean_load_factor = 1.28;

  const TierParams& tier(Tier t) const { return t == Tier::Macro ? macro : pico; }
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when an adaptive integration or a truncated sum cannot reach the
/// requested accuracy.
class NumericAccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks every documented invariant of `cfg`; throws ConfigError naming the
/// offending field.
void validate(const NetworkConfig& cfg);

/// Structural checks only (positivity, alpha > 2); used by the math routines
/// which also accept degenerate set-ups such as equal tier powers.
void validate_tier(const TierParams& tier, const std::string& name);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace hetnet
