#include "hetnet/network.hpp"

namespace hetnet {

void validate_tier(const TierParams& tier, const std::string& name) {
  if (!(tier.density > 0.0)) throw ConfigError(name + ".density", "must be > 0");
  if (!(tier.pathloss > 2.0)) throw ConfigError(name + ".pathloss", "must be > 2");
  if (!(tier.power > 0.0)) throw ConfigError(name + ".power", "must be > 0");
  if (tier.antennas < 1) throw ConfigError(name + ".antennas", "must be >= 1");
}

void validate(const NetworkConfig& cfg) {
  validate_tier(cfg.macro, "network.macro");
  validate_tier(cfg.pico, "network.pico");
  if (!(cfg.macro.power > cfg.pico.power))
    throw ConfigError("network.pico.power", "macro power must exceed pico power");
  if (!(cfg.user_density > 0.0)) throw ConfigError("network.user_density", "must be > 0");
  if (!(cfg.bias >= 1.0)) throw ConfigError("network.bias", "must be >= 1 (0 dB)");
  if (!(cfg.bandwidth > 0.0)) throw ConfigError("network.bandwidth", "must be > 0");
  if (cfg.in_dof < 0 || cfg.in_dof > cfg.macro.antennas - 1)
    throw ConfigError("network.in_dof", "must lie in [0, macro.antennas - 1]");
  if (!(cfg.load_shape > 0.0)) throw ConfigError("network.load_shape", "must be > 0");
  if (!(cfg.mean_load_factor > 0.0))
    throw ConfigError("network.mean_load_factor", "must be > 0");
}

}  // namespace hetnet
