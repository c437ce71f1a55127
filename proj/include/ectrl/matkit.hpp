#pragma once

#include <Eigen/Dense>

#include "ectrl/errors.hpp"

namespace ectrl {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Symmetric positive definite matrix. Construction validates symmetry
// (relative tolerance 1e-10) and positive definiteness, so holders of an
// SpdMatrix may rely on both.
class SpdMatrix {
 public:
  // Throws DimensionMismatch if m is not square, NotPositiveDefinite if m is
  // not symmetric to tolerance or has a nonpositive eigenvalue.
  static SpdMatrix FromMatrix(const RealMatrix& m);

  const RealMatrix& matrix() const { return m_; }
  Eigen::Index rows() const { return m_.rows(); }
  double trace() const { return m_.trace(); }

 private:
  explicit SpdMatrix(RealMatrix m) : m_(std::move(m)) {}
  RealMatrix m_;
};

// Largest absolute eigenvalue of a square matrix.
double spectral_radius(const RealMatrix& a);

// sqrt(sum of squared entries) = sqrt(tr(M^T M)).
double frobenius_norm(const RealMatrix& m);

// Solves A X A^T - X + I = 0 for the controllability Gramian of x+ = A x + w
// by the squaring iteration X_{k+1} = X_k + A_k X_k A_k^T, A_{k+1} = A_k^2.
// Requires spectral_radius(a) < 1 - 1e-9 (UnstableMatrix otherwise); throws
// NonConvergence if the iteration fails to meet the residual contract
// ||A X A^T - X + I||_F <= 1e-9 ||X||_F.
SpdMatrix solve_discrete_lyapunov(const RealMatrix& a);

// Right pseudo-inverse X^+ = X^T (X X^T)^{-1} for a full-row-rank X.
// Throws RankDeficient when the condition estimate of X X^T exceeds 1e12.
RealMatrix pseudo_inverse_full_row_rank(const RealMatrix& x);

// Cholesky solve of A X = B for SPD A.
RealMatrix solve_spd(const SpdMatrix& a, const RealMatrix& b);

}  // namespace ectrl
