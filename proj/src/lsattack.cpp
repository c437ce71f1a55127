#include "ectrl/lsattack.hpp"

#include <cmath>

#include "ectrl/rng.hpp"

namespace ectrl {

AttackDataset assemble(const Trajectory& traj, const AttackWindow& window) {
  if (!(0 < window.t_s && window.t_s < window.t_f)) {
    throw WindowOutOfRange("assemble: need 0 < t_s < t_f");
  }
  const long last_index = static_cast<long>(traj.states.size()) - 1;
  if (window.t_f > last_index) {
    throw WindowOutOfRange("assemble: window exceeds trajectory horizon");
  }
  const int n = static_cast<int>(traj.states.front().size());
  const long cols = window.t_f - window.t_s;  // N - 1 shifted pairs
  AttackDataset data;
  data.x_p.resize(n, cols);
  data.x_f.resize(n, cols);
  for (long c = 0; c < cols; ++c) {
    data.x_p.col(c) = traj.states[window.t_s + c];
    data.x_f.col(c) = traj.states[window.t_s + c + 1];
  }
  if (!traj.noises.empty()) {
    RealMatrix w(n, cols);
    for (long c = 0; c < cols; ++c) w.col(c) = traj.noises[window.t_s + c];
    data.w_p = std::move(w);
  }
  return data;
}

RealMatrix least_squares_estimate(const AttackDataset& data) {
  if (data.x_p.rows() != data.x_f.rows() ||
      data.x_p.cols() != data.x_f.cols()) {
    throw DimensionMismatch("least_squares_estimate: X_p, X_f shapes differ");
  }
  return data.x_f * pseudo_inverse_full_row_rank(data.x_p);
}

double estimation_error(const RealMatrix& a_true, const RealMatrix& a_hat) {
  if (a_true.rows() != a_hat.rows() || a_true.cols() != a_hat.cols()) {
    throw DimensionMismatch("estimation_error: shapes differ");
  }
  const double n = static_cast<double>(a_true.rows());
  const double diff = (a_true - a_hat).norm();
  return diff * diff / (n * n);
}

MonteCarloTable monte_carlo(const PlantModel& plant, const FeedbackGain& gain,
                            const std::vector<long>& sizes, int trials,
                            std::uint64_t seed) {
  if (trials < 1) {
    throw Error("monte_carlo: trials must be >= 1");
  }
  const long min_size = plant.n() + 2;
  for (long n_samples : sizes) {
    if (n_samples < min_size) {
      throw Error("monte_carlo: every sample size must be >= n + 2");
    }
  }
  const RealMatrix a_true = closed_loop(plant, gain);

  MonteCarloTable table;
  table.rows.reserve(sizes.size() * trials);
  for (long n_samples : sizes) {
    double sum = 0.0;
    long successes = 0;
    for (int trial = 0; trial < trials; ++trial) {
      MonteCarloRow row{n_samples, trial, 0.0, false};
      try {
        const std::uint64_t sub_seed =
            mix_seed(seed, static_cast<std::uint64_t>(n_samples),
                     static_cast<std::uint64_t>(trial));
        // Window t_s = 1, t_f = N needs states x_1..x_N, i.e. horizon N.
        const Trajectory traj =
            simulate(plant, gain, static_cast<int>(n_samples), sub_seed);
        const AttackDataset data = assemble(traj, AttackWindow{1, n_samples});
        const RealMatrix a_hat = least_squares_estimate(data);
        row.epsilon = estimation_error(a_true, a_hat);
        sum += row.epsilon;
        ++successes;
      } catch (const Error&) {
        row.failed = true;
        row.epsilon = std::nan("");
      }
      table.rows.push_back(row);
    }
    table.summary.push_back(MonteCarloSummary{
        n_samples, successes > 0 ? sum / static_cast<double>(successes)
                                 : std::nan("")});
  }
  return table;
}

}  // namespace ectrl
