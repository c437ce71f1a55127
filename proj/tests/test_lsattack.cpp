#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ectrl/h2syn.hpp"
#include "ectrl/lsattack.hpp"
#include "ectrl/seclevel.hpp"
#include "test_support.hpp"

using namespace ectrl;
namespace ts = ectrl::testsupport;

TEST_CASE("assemble slices shifted state matrices") {
  const PlantModel plant = ts::benchmark_plant();
  const Trajectory traj = simulate(plant, ts::benchmark_gain(), 20, 5);

  const AttackDataset minimal = assemble(traj, AttackWindow{1, 2});
  REQUIRE(minimal.x_p.cols() == 1);
  CHECK((minimal.x_p.col(0) - traj.states[1]).norm() == 0.0);
  CHECK((minimal.x_f.col(0) - traj.states[2]).norm() == 0.0);

  const AttackWindow window{3, 15};
  const AttackDataset data = assemble(traj, window);
  REQUIRE(data.x_p.cols() == window.sample_size() - 1);
  for (long c = 0; c < data.x_p.cols(); ++c) {
    CHECK((data.x_p.col(c) - traj.states[3 + c]).norm() == 0.0);
    CHECK((data.x_f.col(c) - traj.states[4 + c]).norm() == 0.0);
  }
  // One-column shift: X_f's leading columns coincide with X_p's tail.
  CHECK((data.x_f.leftCols(data.x_f.cols() - 1) -
         data.x_p.rightCols(data.x_p.cols() - 1))
            .norm() == 0.0);

  // X_f = A X_p + W_p reconstructs exactly from the recorded noises.
  REQUIRE(data.w_p.has_value());
  const RealMatrix a_cl = closed_loop(plant, ts::benchmark_gain());
  CHECK((data.x_f - (a_cl * data.x_p + *data.w_p)).norm() == 0.0);

  CHECK_THROWS_AS(assemble(traj, AttackWindow{0, 5}), WindowOutOfRange);
  CHECK_THROWS_AS(assemble(traj, AttackWindow{5, 5}), WindowOutOfRange);
  CHECK_THROWS_AS(assemble(traj, AttackWindow{1, 21}), WindowOutOfRange);
}

TEST_CASE("least squares: identity regressor returns X_f") {
  AttackDataset data;
  data.x_p = RealMatrix::Identity(3, 3);
  std::mt19937_64 rng(3);
  data.x_f = ts::random_matrix(rng, 3, 3);
  CHECK((least_squares_estimate(data) - data.x_f).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("least squares: noiseless trajectories identify A exactly") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const RealMatrix a = ts::random_stable(rng, n, 0.9);
    Trajectory traj;
    traj.states.push_back(ts::random_matrix(rng, n, 1).col(0));
    for (int t = 0; t < 3 * n; ++t) {
      traj.states.push_back(a * traj.states.back());
      traj.noises.push_back(RealVector::Zero(n));
    }
    const AttackDataset data =
        assemble(traj, AttackWindow{1, static_cast<long>(3 * n)});
    const RealMatrix a_hat = least_squares_estimate(data);
    const double eps = estimation_error(a, a_hat);
    CHECK(eps <= 1e-16 * a.norm() * a.norm());
  }
}

TEST_CASE("least squares: residual beats random alternatives") {
  const PlantModel plant = ts::benchmark_plant();
  const Trajectory traj = simulate(plant, ts::benchmark_gain(), 200, 31);
  const AttackDataset data = assemble(traj, AttackWindow{1, 200});
  const RealMatrix a_hat = least_squares_estimate(data);
  const double best = (data.x_f - a_hat * data.x_p).norm();

  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 100; ++rep) {
    const RealMatrix alt = a_hat + 0.01 * ts::random_matrix(rng, 4, 4);
    CHECK((data.x_f - alt * data.x_p).norm() >= best);
  }
}

TEST_CASE("estimation error formula") {
  const RealMatrix a = ts::benchmark_plant().a_p;
  CHECK(estimation_error(a, a) == 0.0);

  RealMatrix a2 = RealMatrix::Zero(2, 2);
  RealMatrix b2 = RealMatrix::Ones(2, 2);
  CHECK(estimation_error(a2, b2) == doctest::Approx(1.0));

  CHECK_THROWS_AS(estimation_error(a2, RealMatrix::Zero(3, 3)),
                  DimensionMismatch);
}

TEST_CASE("monte carlo: deterministic tables") {
  const PlantModel plant = ts::benchmark_plant();
  const FeedbackGain gain = ts::benchmark_gain();
  const std::vector<long> sizes{100, 200};

  const MonteCarloTable a = monte_carlo(plant, gain, sizes, 3, 2024);
  const MonteCarloTable b = monte_carlo(plant, gain, sizes, 3, 2024);
  REQUIRE(a.rows.size() == 6);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].epsilon == b.rows[i].epsilon);
    CHECK_FALSE(a.rows[i].failed);
  }
  REQUIRE(a.summary.size() == 2);
  CHECK(a.summary[0].n_samples == 100);
  CHECK(a.summary[1].n_samples == 200);

  const MonteCarloTable c = monte_carlo(plant, gain, sizes, 3, 2025);
  CHECK(c.rows[0].epsilon != a.rows[0].epsilon);

  CHECK_THROWS_AS(monte_carlo(plant, gain, sizes, 0, 1), Error);
  CHECK_THROWS_AS(monte_carlo(plant, gain, {4}, 1, 1), Error);
}

TEST_CASE("monte carlo: mean error dominates the identifying complexity") {
  const PlantModel plant = ts::benchmark_plant();
  const SynthesisResult synth = extract_gain(plant, solve_h2_sdp(plant));
  std::vector<long> sizes;
  for (long n = 500; n <= 5000; n += 500) sizes.push_back(n);

  const MonteCarloTable table = monte_carlo(plant, synth.gain, sizes, 50, 1);
  REQUIRE(table.summary.size() == sizes.size());
  for (const auto& row : table.summary) {
    const double gamma = sic(row.n_samples, plant, synth.gain);
    CHECK(row.mean_epsilon >= gamma);
  }

  // Mean error decays like 1/N: log-log slope near -1.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(table.summary.size());
  for (const auto& row : table.summary) {
    const double x = std::log(static_cast<double>(row.n_samples));
    const double y = std::log(row.mean_epsilon);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
}
