#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ectrl/matkit.hpp"
#include "ectrl/plantsim.hpp"

namespace ectrl {

// Eavesdropping interval [t_s, t_f] with 0 < t_s < t_f; the attacker sees
// N = t_f - t_s + 1 states.
struct AttackWindow {
  long t_s = 0;
  long t_f = 0;

  long sample_size() const { return t_f - t_s + 1; }
};

// Shifted data matrices X_p = [x_{t_s} .. x_{t_f-1}], X_f = [x_{t_s+1} ..
// x_{t_f}]; when the source trajectory recorded its noises, W_p carries the
// matching slice so X_f = A X_p + W_p can be reconstructed exactly.
struct AttackDataset {
  RealMatrix x_p;
  RealMatrix x_f;
  std::optional<RealMatrix> w_p;
};

struct AttackResult {
  RealMatrix a_hat;
  double epsilon = 0.0;  // (1/n^2) ||A - A_hat||_F^2
};

struct MonteCarloRow {
  long n_samples = 0;
  int trial = 0;
  double epsilon = 0.0;
  bool failed = false;  // attack raised (rank-deficient window etc.)
};

struct MonteCarloSummary {
  long n_samples = 0;
  double mean_epsilon = 0.0;
};

struct MonteCarloTable {
  std::vector<MonteCarloRow> rows;          // ordered by (N, trial)
  std::vector<MonteCarloSummary> summary;   // per-N mean over non-failed rows
};

AttackDataset assemble(const Trajectory& traj, const AttackWindow& window);

// A_hat = X_f X_p^+, the Frobenius-optimal linear fit (Def. 5 step 3).
RealMatrix least_squares_estimate(const AttackDataset& data);

double estimation_error(const RealMatrix& a_true, const RealMatrix& a_hat);

// Repeats the attack `trials` times per sample size on freshly simulated
// trajectories (window t_s = 1, t_f = N). Per-trial seeds derive from the
// master seed via mix_seed(seed, N, trial), so the sweep is reproducible and
// individual trials are independent.
MonteCarloTable monte_carlo(const PlantModel& plant, const FeedbackGain& gain,
                            const std::vector<long>& sizes, int trials,
                            std::uint64_t seed);

}  // namespace ectrl
