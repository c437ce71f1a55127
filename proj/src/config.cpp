#include "ectrl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace ectrl {

namespace {

using nlohmann::json;

RealMatrix matrix_from_row_major(const json& values, int rows, int cols,
                                 const std::string& name) {
  if (!values.is_array() ||
      values.size() != static_cast<std::size_t>(rows) * cols) {
    throw ConfigError(name + " must be a row-major array of " +
                      std::to_string(rows) + "x" + std::to_string(cols) +
                      " numbers");
  }
  RealMatrix m(rows, cols);
  std::size_t idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j, ++idx) {
      if (!values[idx].is_number()) {
        throw ConfigError(name + " entries must be numbers");
      }
      m(i, j) = values[idx].get<double>();
    }
  }
  return m;
}

const json& require(const json& node, const char* key,
                    const std::string& context) {
  auto it = node.find(key);
  if (it == node.end()) {
    throw ConfigError(context + " is missing required key '" + key + "'");
  }
  return *it;
}

}  // namespace

double CryptoConfig::delta_scale() const {
  return std::ldexp(1.0, delta_scale_log2);
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  try {
    ConfigFile cfg;
    const json& plant = require(root, "plant", "config");
    const int n = require(plant, "n", "plant").get<int>();
    const int m = require(plant, "m", "plant").get<int>();
    if (n < 1 || m < 1) {
      throw ConfigError("plant dimensions must be positive");
    }
    cfg.plant.a_p = matrix_from_row_major(require(plant, "a_p", "plant"), n, n,
                                          "plant.a_p");
    cfg.plant.b_p = matrix_from_row_major(require(plant, "b_p", "plant"), n, m,
                                          "plant.b_p");
    cfg.plant.sigma2 = require(plant, "sigma2", "plant").get<double>();
    if (!(cfg.plant.sigma2 > 0.0)) {
      throw ConfigError("plant.sigma2 must be positive");
    }

    if (root.contains("security")) {
      const json& sec = root["security"];
      SecuritySpec spec;
      spec.gamma_c = require(sec, "gamma_c", "security").get<double>();
      spec.tau_c = require(sec, "tau_c_seconds", "security").get<double>();
      spec.upsilon = require(sec, "upsilon_flops", "security").get<double>();
      if (!(spec.gamma_c > 0.0) || !(spec.tau_c > 0.0) ||
          !(spec.upsilon > 0.0)) {
        throw ConfigError("security entries must be positive");
      }
      cfg.security = spec;
    }

    if (root.contains("attack")) {
      const json& atk = root["attack"];
      AttackConfig attack;
      const json& sizes = require(atk, "sizes", "attack");
      if (!sizes.is_array() || sizes.empty()) {
        throw ConfigError("attack.sizes must be a nonempty array");
      }
      for (const auto& v : sizes) {
        const long size = v.get<long>();
        if (size < 2) throw ConfigError("attack sample sizes must be >= 2");
        attack.sizes.push_back(size);
      }
      attack.trials = require(atk, "trials", "attack").get<int>();
      if (attack.trials < 1) throw ConfigError("attack.trials must be >= 1");
      attack.seed = require(atk, "seed", "attack").get<std::uint64_t>();
      cfg.attack = attack;
    }

    if (root.contains("crypto")) {
      const json& cry = root["crypto"];
      CryptoConfig crypto;
      crypto.key_length_bits =
          require(cry, "key_length_bits", "crypto").get<int>();
      crypto.delta_scale_log2 =
          require(cry, "delta_scale_log2", "crypto").get<int>();
      if (cry.contains("horizon")) {
        crypto.horizon = cry["horizon"].get<int>();
        if (crypto.horizon < 0) {
          throw ConfigError("crypto.horizon must be >= 0");
        }
      }
      if (crypto.key_length_bits < 16) {
        throw ConfigError("crypto.key_length_bits must be >= 16");
      }
      cfg.crypto = crypto;
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace ectrl
