#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ectrl/config.hpp"
#include "ectrl/cryptoloop.hpp"
#include "ectrl/lsattack.hpp"
#include "ectrl/seclevel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMath = 3;

using ectrl::format_float;

int cmd_design(const std::string& config_path) {
  const ectrl::ConfigFile cfg = ectrl::ConfigFile::load(config_path);
  if (!cfg.security) {
    throw ectrl::ConfigError("design requires a 'security' config section");
  }
  const ectrl::SecurityReport report =
      ectrl::design_pipeline(cfg.plant, *cfg.security);

  std::ostringstream out;
  out << "{\n  \"f_star\": [";
  const ectrl::RealMatrix& f = report.f_star.f;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      if (i != 0 || j != 0) out << ", ";
      out << format_float(f(i, j));
    }
  }
  out << "],\n";
  out << "  \"gramian_trace\": " << format_float(report.gramian_trace)
      << ",\n";
  out << "  \"n_star\": " << report.n_star << ",\n";
  out << "  \"lambda_star\": " << report.lambda_star << ",\n";
  out << "  \"lambda_star_static\": " << report.lambda_star_static << ",\n";
  out << "  \"k_star\": " << report.k_star << ",\n";
  out << "  \"k_star_static\": " << report.k_star_static << ",\n";
  out << "  \"secure\": " << (report.secure ? "true" : "false") << "\n}\n";
  std::cout << out.str();
  return 0;
}

int cmd_attack_sim(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override) {
  const ectrl::ConfigFile cfg = ectrl::ConfigFile::load(config_path);
  if (!cfg.attack) {
    throw ectrl::ConfigError("attack-sim requires an 'attack' config section");
  }
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.attack->seed;

  // The attack targets the security-optimal loop: synthesize F*, then sweep.
  const ectrl::SdpSolution sol = ectrl::solve_h2_sdp(cfg.plant);
  const ectrl::SynthesisResult synth = ectrl::extract_gain(cfg.plant, sol);
  const ectrl::MonteCarloTable table = ectrl::monte_carlo(
      cfg.plant, synth.gain, cfg.attack->sizes, cfg.attack->trials, seed);

  std::filesystem::create_directories(out_dir);
  const auto trials_path = std::filesystem::path(out_dir) / "trials.csv";
  const auto summary_path = std::filesystem::path(out_dir) / "summary.csv";

  std::ofstream trials(trials_path);
  trials << "N,trial,epsilon\n";
  for (const auto& row : table.rows) {
    trials << row.n_samples << ',' << row.trial << ','
           << format_float(row.epsilon) << '\n';
  }
  std::ofstream summary(summary_path);
  summary << "N,mean_epsilon,gamma\n";
  for (const auto& s : table.summary) {
    const double gamma =
        ectrl::sic(s.n_samples, cfg.plant, synth.gain);
    summary << s.n_samples << ',' << format_float(s.mean_epsilon) << ','
            << format_float(gamma) << '\n';
  }
  trials.flush();
  summary.flush();
  if (!trials || !summary) {
    throw ectrl::ConfigError("attack-sim: cannot write CSV output under " +
                             out_dir);
  }
  return 0;
}

int cmd_keylen(int lambda) {
  std::cout << ectrl::opt_key_length(lambda) << "\n";
  return 0;
}

int cmd_encdemo(const std::string& config_path,
                std::optional<std::uint64_t> seed_override) {
  const ectrl::ConfigFile cfg = ectrl::ConfigFile::load(config_path);
  if (!cfg.crypto) {
    throw ectrl::ConfigError("encdemo requires a 'crypto' config section");
  }
  std::uint64_t seed = cfg.attack ? cfg.attack->seed : 0;
  if (seed_override) seed = *seed_override;

  const ectrl::SdpSolution sol = ectrl::solve_h2_sdp(cfg.plant);
  const ectrl::SynthesisResult synth = ectrl::extract_gain(cfg.plant, sol);
  const ectrl::EncryptedLoopResult result = ectrl::run_encrypted_loop(
      cfg.plant, synth.gain, cfg.crypto->horizon, cfg.crypto->key_length_bits,
      cfg.crypto->delta_scale(), seed);

  std::cout << "{\n  \"max_deviation\": "
            << format_float(result.max_deviation) << ",\n"
            << "  \"horizon\": " << cfg.crypto->horizon << ",\n"
            << "  \"key_length\": " << cfg.crypto->key_length_bits << ",\n"
            << "  \"epochs_rotated\": " << result.epochs_rotated << "\n}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security-optimal encrypted control design toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int lambda = 0;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_raw = 0;

  auto* design = app.add_subcommand(
      "design", "Synthesize F*, N*, lambda*, and key lengths");
  design->add_option("--config", config_path, "JSON config path")->required();

  auto* attack = app.add_subcommand(
      "attack-sim", "Monte-Carlo least-squares identification sweep");
  attack->add_option("--config", config_path, "JSON config path")->required();
  attack->add_option("--out", out_dir, "directory for trials.csv/summary.csv");
  auto* seed_opt =
      attack->add_option("--seed", seed_raw, "override the config seed");

  auto* keylen = app.add_subcommand(
      "keylen", "Minimum GNFS-secure key length for a security parameter");
  keylen->add_option("--lambda", lambda, "security parameter in bits")
      ->required();

  auto* encdemo = app.add_subcommand(
      "encdemo", "Run the updatable-ElGamal encrypted loop demo");
  encdemo->add_option("--config", config_path, "JSON config path")->required();
  auto* seed_opt2 =
      encdemo->add_option("--seed", seed_raw, "override the config seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (design->parsed()) return cmd_design(config_path);
    if (attack->parsed()) {
      if (seed_opt->count() > 0) seed_override = seed_raw;
      return cmd_attack_sim(config_path, out_dir, seed_override);
    }
    if (keylen->parsed()) return cmd_keylen(lambda);
    if (encdemo->parsed()) {
      if (seed_opt2->count() > 0) seed_override = seed_raw;
      return cmd_encdemo(config_path, seed_override);
    }
  } catch (const ectrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ectrl::Error& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitMath;
  }
  return kExitConfig;
}
