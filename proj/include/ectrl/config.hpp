#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ectrl/plantsim.hpp"
#include "ectrl/seclevel.hpp"

namespace ectrl {

// Config-file problems are reported separately from math failures so the CLI
// can map them to distinct exit codes (2 vs 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttackConfig {
  std::vector<long> sizes;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct CryptoConfig {
  int key_length_bits = 0;
  int delta_scale_log2 = 0;
  int horizon = 200;

  double delta_scale() const;
};

struct ConfigFile {
  PlantModel plant;
  std::optional<SecuritySpec> security;
  std::optional<AttackConfig> attack;
  std::optional<CryptoConfig> crypto;

  // Parses and shape-checks the JSON config; throws ConfigError on any
  // structural or invariant problem.
  static ConfigFile load(const std::string& path);
};

// Shortest-width fixed formatting used for every float the CLI emits:
// 17 significant digits round-trip any double.
std::string format_float(double v);

}  // namespace ectrl
