#pragma once

#include "ectrl/matkit.hpp"
#include "ectrl/plantsim.hpp"

namespace ectrl {

// Converged central-path point of the semidefinite program
//   min tr(P)  s.t.  P > 0,  [P R I; R^T P 0; I 0 I] > 0,  R = A_p P + B_p Q.
struct SdpSolution {
  double eta = 0.0;  // certified objective: tr(P*) + barrier_gap
  SpdMatrix p_star;
  RealMatrix q_star;
  double barrier_gap = 0.0;
  int iterations = 0;  // total Newton steps across the path
};

struct SynthesisResult {
  FeedbackGain gain;   // F* = Q* (P*)^{-1}
  SpdMatrix gramian;   // Psi* of the closed loop under F*
  double gramian_trace = 0.0;
};

// Assembles the 3n x 3n block matrix [P R I; R^T P O; I O I] with
// R = A_p P + B_p Q. Positive definiteness of this block matrix certifies
// closed-loop stability and P > Psi(Q P^{-1}).
RealMatrix lmi_value(const PlantModel& plant, const SpdMatrix& p,
                     const RealMatrix& q);

// Minimizes tr(P) over the strictly feasible set by a log-det barrier
// central-path method with damped Newton steps. Deterministic given the
// plant. Throws NotControllable, BarrierInitFailure, or NonConvergence.
SdpSolution solve_h2_sdp(const PlantModel& plant);

// F* = Q*(P*)^{-1}; recomputes the closed-loop Gramian and asserts
// stability (UnstableResult flags numerical breakdown of the solver).
SynthesisResult extract_gain(const PlantModel& plant, const SdpSolution& sol);

// tr(Psi) for the closed loop under an arbitrary stabilizing gain.
double gramian_trace(const PlantModel& plant, const FeedbackGain& gain);

// Discrete algebraic Riccati equation
//   X = A^T X A - A^T X B (R + B^T X B)^{-1} B^T X A + Q
// solved by the structure-preserving doubling iteration.
RealMatrix solve_dare(const RealMatrix& a, const RealMatrix& b,
                      const RealMatrix& q, const RealMatrix& r);

// LQR gain for state weight I and control weight control_weight * I. The
// control_weight -> 0 limit is a second, Riccati-based route to the
// tr(Psi)-optimal gain; tests use it as a cross-check on the SDP path.
FeedbackGain lqr_gain(const PlantModel& plant, double control_weight);

}  // namespace ectrl
