#pragma once

#include <cstdint>
#include <vector>

#include "ectrl/matkit.hpp"

namespace ectrl {

// Discrete-time plant x_{t+1} = A_p x_t + B_p u_t + w_t with i.i.d. Gaussian
// noise and initial state, both N(0, sigma2 I).
struct PlantModel {
  RealMatrix a_p;  // n x n
  RealMatrix b_p;  // n x m
  double sigma2 = 0.0;

  int n() const { return static_cast<int>(a_p.rows()); }
  int m() const { return static_cast<int>(b_p.cols()); }

  // Throws DimensionMismatch / NotControllable / Error on invariant
  // violations (shape, controllability, sigma2 > 0).
  void validate() const;
};

// Static state feedback u_t = F x_t.
struct FeedbackGain {
  RealMatrix f;  // m x n
};

// A closed-loop run: states x_0..x_T and the noises w_0..w_{T-1} that drove
// it. x_{t+1} == A x_t + w_t holds for the stored vectors by construction.
struct Trajectory {
  std::vector<RealVector> states;
  std::vector<RealVector> noises;
  std::uint64_t seed = 0;

  int horizon() const { return static_cast<int>(noises.size()); }
};

// Rank test on [B  AB ... A^{n-1}B].
bool is_controllable(const RealMatrix& a, const RealMatrix& b);

// A = A_p + B_p F. No stability requirement; callers check.
RealMatrix closed_loop(const PlantModel& plant, const FeedbackGain& gain);

// Draws x_0 and w_t from N(0, sigma2 I) using the seeded sampler and rolls
// the closed loop forward for `horizon` steps. Identical seeds give
// bit-identical trajectories. Throws UnstableClosedLoop if rho(A) >= 1.
Trajectory simulate(const PlantModel& plant, const FeedbackGain& gain,
                    int horizon, std::uint64_t seed);

}  // namespace ectrl
