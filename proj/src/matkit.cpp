#include "ectrl/matkit.hpp"

#include <cmath>

namespace ectrl {

namespace {

// Relative tolerances switch to absolute 1e-12 once the reference norm
// underflows; keeps the comparisons total.
double scale_or_floor(double reference_norm) {
  return reference_norm < 1e-300 ? 1e-12 : reference_norm;
}

}  // namespace

SpdMatrix SpdMatrix::FromMatrix(const RealMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SpdMatrix: matrix must be square");
  }
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-10 * scale_or_floor(m.norm())) {
    throw NotPositiveDefinite("SpdMatrix: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw NotPositiveDefinite("SpdMatrix: matrix has a nonpositive eigenvalue");
  }
  return SpdMatrix(0.5 * (m + m.transpose()));
}

double spectral_radius(const RealMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("spectral_radius: matrix must be square");
  }
  if (a.rows() == 0) return 0.0;
  return a.eigenvalues().cwiseAbs().maxCoeff();
}

double frobenius_norm(const RealMatrix& m) { return m.norm(); }

SpdMatrix solve_discrete_lyapunov(const RealMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("solve_discrete_lyapunov: matrix must be square");
  }
  if (spectral_radius(a) >= 1.0 - 1e-9) {
    throw UnstableMatrix(
        "solve_discrete_lyapunov: spectral radius >= 1 - 1e-9, Gramian series "
        "diverges");
  }
  const Eigen::Index n = a.rows();
  RealMatrix psi = RealMatrix::Identity(n, n);
  RealMatrix ak = a;
  // psi after k rounds equals sum_{j<2^k} A^j (A^j)^T; 64 doublings cover any
  // spectral radius admitted above.
  constexpr int kMaxDoublings = 64;
  bool converged = false;
  for (int k = 0; k < kMaxDoublings; ++k) {
    const RealMatrix update = ak * psi * ak.transpose();
    psi += update;
    if (update.norm() < 1e-14 * scale_or_floor(psi.norm())) {
      converged = true;
      break;
    }
    ak = ak * ak;
  }
  if (!converged) {
    throw NonConvergence("solve_discrete_lyapunov: doubling iteration stalled");
  }
  psi = 0.5 * (psi + psi.transpose());
  const double residual =
      (a * psi * a.transpose() - psi + RealMatrix::Identity(n, n)).norm();
  if (residual > 1e-9 * scale_or_floor(psi.norm())) {
    throw NonConvergence("solve_discrete_lyapunov: residual above contract");
  }
  return SpdMatrix::FromMatrix(psi);
}

RealMatrix pseudo_inverse_full_row_rank(const RealMatrix& x) {
  const RealMatrix gram = x * x.transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  // Reciprocal condition estimate threshold 1e-12 on the Gram matrix.
  if (!(lmax > 1e-300) || lmin <= 1e-12 * lmax) {
    throw RankDeficient(
        "pseudo_inverse_full_row_rank: X X^T numerically singular");
  }
  Eigen::LLT<RealMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw RankDeficient("pseudo_inverse_full_row_rank: factorization failed");
  }
  // X^+ = X^T (X X^T)^{-1}, computed as (G^{-1} X)^T.
  return llt.solve(x).transpose();
}

RealMatrix solve_spd(const SpdMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionMismatch("solve_spd: row counts differ");
  }
  Eigen::LLT<RealMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("solve_spd: Cholesky factorization failed");
  }
  RealMatrix x = llt.solve(b);
  // One step of iterative refinement; cheap and tightens the residual for
  // ill-conditioned right-hand sides.
  x += llt.solve(b - a.matrix() * x);
  return x;
}

}  // namespace ectrl
