#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "ectrl/h2syn.hpp"
#include "test_support.hpp"

using namespace ectrl;
namespace ts = ectrl::testsupport;

namespace {

SpdMatrix identity_spd(int n) {
  return SpdMatrix::FromMatrix(RealMatrix::Identity(n, n));
}

double min_eigenvalue(const RealMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<RealMatrix>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

}  // namespace

TEST_CASE("lmi_value assembles the block matrix exactly") {
  PlantModel zero;
  zero.a_p = RealMatrix::Zero(2, 2);
  zero.b_p = RealMatrix::Zero(2, 1);
  zero.sigma2 = 1.0;

  const RealMatrix m = lmi_value(zero, identity_spd(2), RealMatrix::Zero(1, 2));
  RealMatrix expected = RealMatrix::Zero(6, 6);
  expected.block(0, 0, 2, 2).setIdentity();
  expected.block(2, 2, 2, 2).setIdentity();
  expected.block(0, 4, 2, 2).setIdentity();
  expected.block(4, 0, 2, 2).setIdentity();
  expected.block(4, 4, 2, 2).setIdentity();
  CHECK((m - expected).norm() == doctest::Approx(0.0));
  // P = I sits exactly on the cone boundary: the (1,3)/(3,1) identity blocks
  // force a zero Schur complement.
  CHECK(min_eigenvalue(m) == doctest::Approx(0.0).epsilon(1e-12));

  const RealMatrix m2 = lmi_value(
      zero, SpdMatrix::FromMatrix(2.0 * RealMatrix::Identity(2, 2)),
      RealMatrix::Zero(1, 2));
  CHECK(min_eigenvalue(m2) > 0.0);

  CHECK_THROWS_AS(
      lmi_value(zero, identity_spd(3), RealMatrix::Zero(1, 3)),
      DimensionMismatch);
}

TEST_CASE("scalar plant: deadbeat is optimal and tr(P*) -> 1") {
  PlantModel plant;
  plant.a_p = RealMatrix::Zero(1, 1);
  plant.b_p = RealMatrix::Ones(1, 1);
  plant.sigma2 = 1.0;

  const SdpSolution sol = solve_h2_sdp(plant);
  CHECK(sol.barrier_gap <= 1e-8);
  CHECK(sol.p_star.trace() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.eta >= sol.p_star.trace());

  const SynthesisResult synth = extract_gain(plant, sol);
  CHECK(std::abs(synth.gain.f(0, 0)) < 1e-4);  // f = -a = 0
  CHECK(synth.gramian_trace == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("invertible input matrix: deadbeat gain recovered") {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 3; ++rep) {
    PlantModel plant;
    const int n = 2 + rep;
    plant.a_p = ts::random_matrix(rng, n, n);
    plant.b_p =
        ts::random_matrix(rng, n, n) + 3.0 * RealMatrix::Identity(n, n);
    plant.sigma2 = 1.0;
    if (!is_controllable(plant.a_p, plant.b_p)) continue;

    const SynthesisResult synth = extract_gain(plant, solve_h2_sdp(plant));
    const RealMatrix deadbeat =
        -plant.b_p.partialPivLu().solve(plant.a_p);
    CHECK((synth.gain.f - deadbeat).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(synth.gramian_trace ==
          doctest::Approx(static_cast<double>(n)).epsilon(1e-6));
  }
}

TEST_CASE("benchmark plant: optimal gain and Gramian trace") {
  const PlantModel plant = ts::benchmark_plant();
  const SdpSolution sol = solve_h2_sdp(plant);
  const SynthesisResult synth = extract_gain(plant, sol);

  // Reference optimum cross-validated by two independent solvers.
  CHECK(synth.gramian_trace == doctest::Approx(5.09185763).epsilon(1e-6));
  CHECK(sol.p_star.trace() >= synth.gramian_trace - 1e-6);

  RealMatrix expected(2, 4);
  expected << 0.06, 0.08, -0.17, -0.24,
              -0.06, -0.63, -0.15, 0.08;
  CHECK((synth.gain.f - expected).cwiseAbs().maxCoeff() < 0.02);

  // Feasibility of the returned central point.
  CHECK(min_eigenvalue(lmi_value(plant, sol.p_star, sol.q_star)) > 0.0);
  // Schur-complement restatement: A_cl P A_cl^T - P + I < 0.
  const RealMatrix a_cl = closed_loop(plant, synth.gain);
  const RealMatrix schur = a_cl * sol.p_star.matrix() * a_cl.transpose() -
                           sol.p_star.matrix() +
                           RealMatrix::Identity(4, 4);
  CHECK(min_eigenvalue(-schur) > 0.0);
}

TEST_CASE("benchmark plant: solver is deterministic") {
  const PlantModel plant = ts::benchmark_plant();
  const SdpSolution a = solve_h2_sdp(plant);
  const SdpSolution b = solve_h2_sdp(plant);
  CHECK((a.p_star.matrix() - b.p_star.matrix()).norm() == 0.0);
  CHECK((a.q_star - b.q_star).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("local optimality of the extracted gain") {
  const PlantModel plant = ts::benchmark_plant();
  const SynthesisResult synth = extract_gain(plant, solve_h2_sdp(plant));
  std::mt19937_64 rng(11);
  constexpr double kStep = 1e-3;
  for (int rep = 0; rep < 100; ++rep) {
    RealMatrix d = ts::random_matrix(rng, 2, 4);
    d /= d.norm();
    const FeedbackGain perturbed{synth.gain.f + kStep * d};
    CHECK(gramian_trace(plant, perturbed) >= synth.gramian_trace - 1e-6);
  }
}

TEST_CASE("optimality against random stabilizing gains") {
  const PlantModel plant = ts::benchmark_plant();
  const SynthesisResult synth = extract_gain(plant, solve_h2_sdp(plant));
  std::mt19937_64 rng(12);
  int tested = 0;
  while (tested < 100) {
    const FeedbackGain candidate{ts::random_matrix(rng, 2, 4, 0.4)};
    if (spectral_radius(closed_loop(plant, candidate)) >= 1.0) continue;
    ++tested;
    CHECK(gramian_trace(plant, candidate) >= synth.gramian_trace - 1e-9);
  }
}

TEST_CASE("global lower bound tr(Psi) >= n for stabilizing gains") {
  std::mt19937_64 rng(13);
  int tested = 0;
  while (tested < 50) {
    const PlantModel plant = ts::random_controllable_plant(rng, 3, 2);
    const FeedbackGain gain{ts::random_matrix(rng, 2, 3, 0.5)};
    if (spectral_radius(closed_loop(plant, gain)) >= 1.0) continue;
    ++tested;
    CHECK(gramian_trace(plant, gain) >= 3.0);
  }
}

TEST_CASE("gramian_trace basics") {
  PlantModel scalar;
  scalar.a_p = RealMatrix::Constant(1, 1, 0.5);
  scalar.b_p = RealMatrix::Ones(1, 1);
  scalar.sigma2 = 1.0;
  CHECK(gramian_trace(scalar, FeedbackGain{RealMatrix::Zero(1, 1)}) ==
        doctest::Approx(1.0 / 0.75).epsilon(1e-12));
  CHECK(gramian_trace(scalar, FeedbackGain{RealMatrix::Constant(1, 1, -0.5)}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(
      gramian_trace(scalar, FeedbackGain{RealMatrix::Constant(1, 1, 0.5)}),
      UnstableClosedLoop);

  const PlantModel plant = ts::benchmark_plant();
  const SynthesisResult synth = extract_gain(plant, solve_h2_sdp(plant));
  CHECK(gramian_trace(plant, synth.gain) ==
        doctest::Approx(synth.gramian_trace));
}

TEST_CASE("uncontrollable plants are rejected") {
  PlantModel plant;
  plant.a_p = RealMatrix::Identity(2, 2);
  plant.b_p = RealMatrix::Zero(2, 1);
  plant.sigma2 = 1.0;
  CHECK_THROWS_AS(solve_h2_sdp(plant), NotControllable);
}

TEST_CASE("regularized Riccati route agrees with the barrier SDP") {
  // rho -> 0 LQR is an independent second path to min tr(Psi).
  const double rho = 1e-8;

  const PlantModel bench = ts::benchmark_plant();
  const SynthesisResult sdp = extract_gain(bench, solve_h2_sdp(bench));
  const FeedbackGain riccati = lqr_gain(bench, rho);
  CHECK(std::abs(gramian_trace(bench, riccati) - sdp.gramian_trace) <=
        1e-3 * sdp.gramian_trace);

  std::mt19937_64 rng(140);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 2);
    const PlantModel plant = ts::random_controllable_plant(rng, n, m);
    const SynthesisResult sdp_r = extract_gain(plant, solve_h2_sdp(plant));
    const double tr_riccati = gramian_trace(plant, lqr_gain(plant, rho));
    CHECK(std::abs(tr_riccati - sdp_r.gramian_trace) <=
          1e-3 * sdp_r.gramian_trace);
  }
}

TEST_CASE("solve_dare satisfies its residual contract") {
  std::mt19937_64 rng(88);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 2);
    const PlantModel plant = ts::random_controllable_plant(rng, n, m);
    const RealMatrix q = RealMatrix::Identity(n, n);
    const RealMatrix r = 0.5 * RealMatrix::Identity(m, m);
    const RealMatrix x = solve_dare(plant.a_p, plant.b_p, q, r);

    const RealMatrix btxb = r + plant.b_p.transpose() * x * plant.b_p;
    const RealMatrix k = btxb.ldlt().solve(plant.b_p.transpose() * x *
                                           plant.a_p);
    const RealMatrix residual = plant.a_p.transpose() * x * plant.a_p -
                                plant.a_p.transpose() * x * plant.b_p * k +
                                q - x;
    CHECK(residual.norm() <= 1e-8 * x.norm());
    CHECK(min_eigenvalue(x) > 0.0);
    // The induced gain must stabilize.
    CHECK(spectral_radius(plant.a_p - plant.b_p * k) < 1.0);
  }
}
