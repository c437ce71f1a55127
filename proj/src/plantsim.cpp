#include "ectrl/plantsim.hpp"

#include <cmath>

#include "ectrl/rng.hpp"

namespace ectrl {

bool is_controllable(const RealMatrix& a, const RealMatrix& b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (a.cols() != n || b.rows() != n || m == 0) return false;
  RealMatrix ctrb(n, n * m);
  RealMatrix block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = block;
    block = a * block;
  }
  Eigen::ColPivHouseholderQR<RealMatrix> qr(ctrb);
  return qr.rank() == n;
}

void PlantModel::validate() const {
  if (a_p.rows() != a_p.cols()) {
    throw DimensionMismatch("PlantModel: A_p must be square");
  }
  if (b_p.rows() != a_p.rows()) {
    throw DimensionMismatch("PlantModel: B_p row count must match A_p");
  }
  if (!(sigma2 > 0.0)) {
    throw Error("PlantModel: sigma2 must be positive");
  }
  if (!a_p.allFinite() || !b_p.allFinite()) {
    throw Error("PlantModel: entries must be finite");
  }
  if (!is_controllable(a_p, b_p)) {
    throw NotControllable("PlantModel: (A_p, B_p) is not controllable");
  }
}

RealMatrix closed_loop(const PlantModel& plant, const FeedbackGain& gain) {
  if (gain.f.cols() != plant.a_p.rows() || gain.f.rows() != plant.b_p.cols()) {
    throw DimensionMismatch("closed_loop: gain shape must be m x n");
  }
  return plant.a_p + plant.b_p * gain.f;
}

Trajectory simulate(const PlantModel& plant, const FeedbackGain& gain,
                    int horizon, std::uint64_t seed) {
  if (horizon < 1) {
    throw Error("simulate: horizon must be >= 1");
  }
  const RealMatrix a = closed_loop(plant, gain);
  if (spectral_radius(a) >= 1.0) {
    throw UnstableClosedLoop("simulate: A_p + B_p F is not stable");
  }
  const int n = plant.n();
  const double sigma = std::sqrt(plant.sigma2);
  GaussianSampler gauss(seed);
  auto draw = [&] {
    RealVector v(n);
    for (int i = 0; i < n; ++i) v(i) = sigma * gauss.next();
    return v;
  };

  Trajectory traj;
  traj.seed = seed;
  traj.states.reserve(horizon + 1);
  traj.noises.reserve(horizon);
  traj.states.push_back(draw());
  for (int t = 0; t < horizon; ++t) {
    traj.noises.push_back(draw());
    traj.states.push_back(a * traj.states.back() + traj.noises.back());
  }
  return traj;
}

}  // namespace ectrl
