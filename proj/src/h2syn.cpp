#include "ectrl/h2syn.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace ectrl {

namespace {

RealMatrix assemble_lmi(const RealMatrix& a_p, const RealMatrix& b_p,
                        const RealMatrix& p, const RealMatrix& q) {
  const Eigen::Index n = a_p.rows();
  const RealMatrix r = a_p * p + b_p * q;
  RealMatrix m = RealMatrix::Zero(3 * n, 3 * n);
  m.block(0, 0, n, n) = p;
  m.block(n, n, n, n) = p;
  m.block(0, n, n, n) = r;
  m.block(n, 0, n, n) = r.transpose();
  m.block(0, 2 * n, n, n) = RealMatrix::Identity(n, n);
  m.block(2 * n, 0, n, n) = RealMatrix::Identity(n, n);
  m.block(2 * n, 2 * n, n, n) = RealMatrix::Identity(n, n);
  return m;
}

// Symmetric-matrix parametrization of the barrier problem: the first
// n(n+1)/2 coordinates are the upper triangle of P, the rest is Q row-major.
struct VarMap {
  int n = 0;
  int m = 0;
  int p_count() const { return n * (n + 1) / 2; }
  int total() const { return p_count() + m * n; }
};

void unpack(const VarMap& vm, const Eigen::VectorXd& u, RealMatrix& p,
            RealMatrix& q) {
  p.setZero(vm.n, vm.n);
  int idx = 0;
  for (int i = 0; i < vm.n; ++i) {
    for (int j = i; j < vm.n; ++j) {
      p(i, j) = u(idx);
      p(j, i) = u(idx);
      ++idx;
    }
  }
  q.resize(vm.m, vm.n);
  for (int k = 0; k < vm.m; ++k) {
    for (int l = 0; l < vm.n; ++l) q(k, l) = u(idx++);
  }
}

Eigen::VectorXd pack(const VarMap& vm, const RealMatrix& p,
                     const RealMatrix& q) {
  Eigen::VectorXd u(vm.total());
  int idx = 0;
  for (int i = 0; i < vm.n; ++i) {
    for (int j = i; j < vm.n; ++j) u(idx++) = p(i, j);
  }
  for (int k = 0; k < vm.m; ++k) {
    for (int l = 0; l < vm.n; ++l) u(idx++) = q(k, l);
  }
  return u;
}

struct Basis {
  std::vector<RealMatrix> lmi;    // dM/du_i, 3n x 3n symmetric
  std::vector<RealMatrix> p_blk;  // dP/du_i, n x n (zero for Q coordinates)
  std::vector<double> tr_p;       // d tr(P)/du_i
};

Basis build_basis(const VarMap& vm, const RealMatrix& a_p,
                  const RealMatrix& b_p) {
  const int n = vm.n;
  Basis basis;
  basis.lmi.reserve(vm.total());
  basis.p_blk.reserve(vm.total());
  basis.tr_p.reserve(vm.total());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      RealMatrix sp = RealMatrix::Zero(n, n);
      sp(i, j) = 1.0;
      sp(j, i) = 1.0;
      RealMatrix em = RealMatrix::Zero(3 * n, 3 * n);
      em.block(0, 0, n, n) = sp;
      em.block(n, n, n, n) = sp;
      const RealMatrix dr = a_p * sp;
      em.block(0, n, n, n) = dr;
      em.block(n, 0, n, n) = dr.transpose();
      basis.lmi.push_back(std::move(em));
      basis.p_blk.push_back(std::move(sp));
      basis.tr_p.push_back(i == j ? 1.0 : 0.0);
    }
  }
  for (int k = 0; k < vm.m; ++k) {
    for (int l = 0; l < n; ++l) {
      RealMatrix dq = RealMatrix::Zero(vm.m, n);
      dq(k, l) = 1.0;
      RealMatrix em = RealMatrix::Zero(3 * n, 3 * n);
      const RealMatrix dr = b_p * dq;
      em.block(0, n, n, n) = dr;
      em.block(n, 0, n, n) = dr.transpose();
      basis.lmi.push_back(std::move(em));
      basis.p_blk.push_back(RealMatrix::Zero(n, n));
      basis.tr_p.push_back(0.0);
    }
  }
  return basis;
}

double log_det_from_llt(const Eigen::LLT<RealMatrix>& llt) {
  const auto& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

// Barrier value t*tr(P) - log det M - log det P, or nullopt outside the
// strictly feasible region.
std::optional<double> barrier_value(const VarMap& vm, const RealMatrix& a_p,
                                    const RealMatrix& b_p,
                                    const Eigen::VectorXd& u, double t) {
  RealMatrix p, q;
  unpack(vm, u, p, q);
  Eigen::LLT<RealMatrix> llt_p(p);
  if (llt_p.info() != Eigen::Success) return std::nullopt;
  Eigen::LLT<RealMatrix> llt_m(assemble_lmi(a_p, b_p, p, q));
  if (llt_m.info() != Eigen::Success) return std::nullopt;
  return t * p.trace() - log_det_from_llt(llt_m) - log_det_from_llt(llt_p);
}

// L^{-1} E L^{-T} for the Cholesky factor L of the barrier matrix.
RealMatrix whiten(const Eigen::LLT<RealMatrix>& llt, const RealMatrix& e) {
  RealMatrix w = llt.matrixL().solve(e);
  return llt.matrixL().solve(w.transpose()).transpose();
}

struct CenterResult {
  Eigen::VectorXd u;
  int newton_steps = 0;
  bool stalled = false;
};

CenterResult newton_center(const VarMap& vm, const Basis& basis,
                           const RealMatrix& a_p, const RealMatrix& b_p,
                           Eigen::VectorXd u, double t) {
  const int dim = vm.total();
  const int n_p_vars = vm.p_count();
  constexpr int kMaxNewton = 200;
  constexpr double kDecrementTol = 1e-11;
  // Once the barrier value stops moving by more than its own rounding noise,
  // a small-but-nonzero decrement is the double-precision centering floor;
  // anything at or below this is accepted as centered. lambda = 1e-2
  // inflates the duality-gap certificate by well under a percent.
  constexpr double kDecrementFloor = 1e-4;
  int no_progress = 0;
  CenterResult res;
  for (int step = 0; step < kMaxNewton; ++step) {
    RealMatrix p, q;
    unpack(vm, u, p, q);
    Eigen::LLT<RealMatrix> llt_p(p);
    Eigen::LLT<RealMatrix> llt_m(assemble_lmi(a_p, b_p, p, q));
    if (llt_p.info() != Eigen::Success || llt_m.info() != Eigen::Success) {
      res.u = u;
      res.newton_steps = step;
      res.stalled = true;
      return res;
    }

    std::vector<RealMatrix> wm(dim), wp(n_p_vars);
    Eigen::VectorXd grad(dim);
    for (int i = 0; i < dim; ++i) {
      wm[i] = whiten(llt_m, basis.lmi[i]);
      double g = t * basis.tr_p[i] - wm[i].trace();
      if (i < n_p_vars) {
        wp[i] = whiten(llt_p, basis.p_blk[i]);
        g -= wp[i].trace();
      }
      grad(i) = g;
    }
    RealMatrix hess(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        double h = wm[i].cwiseProduct(wm[j]).sum();
        if (i < n_p_vars && j < n_p_vars) {
          h += wp[i].cwiseProduct(wp[j]).sum();
        }
        hess(i, j) = h;
        hess(j, i) = h;
      }
    }

    // Near the end of the path the Hessian condition number grows like t^2,
    // far past what a Cholesky solve tolerates. An eigenvalue-clamped
    // pseudo-solve keeps the step a descent direction no matter how
    // degenerate the curvature gets.
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hess);
    const Eigen::VectorXd& eig = es.eigenvalues();
    const double eig_floor = std::max(eig.maxCoeff() * 1e-14, 1e-300);
    const Eigen::VectorXd coeffs = es.eigenvectors().transpose() * grad;
    Eigen::VectorXd delta =
        -(es.eigenvectors() *
          (coeffs.array() / eig.array().max(eig_floor)).matrix());
    const double decrement2 = -grad.dot(delta);
    if (decrement2 <= 2.0 * kDecrementTol) {
      res.u = u;
      res.newton_steps = step;
      return res;
    }

    const double phi0 = *barrier_value(vm, a_p, b_p, u, t);
    double alpha = 1.0;
    double achieved = 0.0;
    bool moved = false;
    while (alpha > 1e-14) {
      const Eigen::VectorXd cand = u + alpha * delta;
      const auto phi = barrier_value(vm, a_p, b_p, cand, t);
      if (phi && *phi <= phi0 - 0.01 * alpha * decrement2) {
        u = cand;
        achieved = phi0 - *phi;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    const double phi_noise = 5e-15 * std::abs(phi0);
    if (!moved || achieved <= phi_noise) {
      ++no_progress;
    } else {
      no_progress = 0;
    }
    if (!moved || no_progress >= 3) {
      res.u = u;
      res.newton_steps = step;
      res.stalled = decrement2 > kDecrementFloor;
      return res;
    }
  }
  res.u = u;
  res.newton_steps = kMaxNewton;
  res.stalled = true;
  return res;
}

}  // namespace

RealMatrix lmi_value(const PlantModel& plant, const SpdMatrix& p,
                     const RealMatrix& q) {
  const Eigen::Index n = plant.a_p.rows();
  if (plant.a_p.cols() != n || plant.b_p.rows() != n || p.rows() != n ||
      q.rows() != plant.b_p.cols() || q.cols() != n) {
    throw DimensionMismatch("lmi_value: shapes must conform");
  }
  return assemble_lmi(plant.a_p, plant.b_p, p.matrix(), q);
}

SdpSolution solve_h2_sdp(const PlantModel& plant) {
  if (plant.a_p.rows() != plant.a_p.cols() ||
      plant.b_p.rows() != plant.a_p.rows()) {
    throw DimensionMismatch("solve_h2_sdp: plant shapes must conform");
  }
  if (!is_controllable(plant.a_p, plant.b_p)) {
    throw NotControllable("solve_h2_sdp: (A_p, B_p) is not controllable");
  }
  const VarMap vm{plant.n(), plant.m()};
  const Basis basis = build_basis(vm, plant.a_p, plant.b_p);
  const double barrier_param = 4.0 * plant.n();  // 3n from the LMI + n from P
  constexpr double kGapTarget = 1e-8;

  // Interior start: a stabilizing LQR gain F0, its Gramian Psi0, and
  // P0 = (1+eps) Psi0, Q0 = F0 P0, which makes the LMI value eps*I-deep
  // inside the cone. eps doubles on a Newton stall, per the restart rule.
  const FeedbackGain f0 = lqr_gain(plant, 1.0);
  const RealMatrix a_cl0 = closed_loop(plant, f0);
  const RealMatrix psi0 = solve_discrete_lyapunov(a_cl0).matrix();

  double eps = 0.1;
  for (int attempt = 0; attempt <= 4; ++attempt, eps *= 2.0) {
    const RealMatrix p0 = (1.0 + eps) * psi0;
    const RealMatrix q0 = f0.f * p0;
    Eigen::VectorXd u = pack(vm, p0, q0);
    if (!barrier_value(vm, plant.a_p, plant.b_p, u, 1.0)) {
      if (attempt == 4) {
        throw BarrierInitFailure(
            "solve_h2_sdp: no strictly feasible start found");
      }
      continue;
    }

    int total_steps = 0;
    double t = 1.0;
    bool stalled = false;
    while (true) {
      CenterResult centered =
          newton_center(vm, basis, plant.a_p, plant.b_p, u, t);
      total_steps += centered.newton_steps;
      if (centered.stalled) {
        stalled = true;
        break;
      }
      u = centered.u;
      if (barrier_param / t < kGapTarget) break;
      t *= 10.0;
    }
    if (stalled) continue;

    RealMatrix p, q;
    unpack(vm, u, p, q);
    SdpSolution sol{.eta = 0.0,
                    .p_star = SpdMatrix::FromMatrix(p),
                    .q_star = q,
                    .barrier_gap = barrier_param / t,
                    .iterations = total_steps};
    sol.eta = p.trace() + sol.barrier_gap;
    return sol;
  }
  throw NonConvergence("solve_h2_sdp: Newton stalled on every restart");
}

SynthesisResult extract_gain(const PlantModel& plant, const SdpSolution& sol) {
  // F = Q P^{-1}  <=>  F^T = P^{-1} Q^T, a single SPD solve.
  const RealMatrix f =
      solve_spd(sol.p_star, sol.q_star.transpose()).transpose();
  const FeedbackGain gain{f};
  const RealMatrix a_cl = closed_loop(plant, gain);
  if (spectral_radius(a_cl) >= 1.0) {
    throw UnstableResult("extract_gain: extracted gain is not stabilizing");
  }
  SpdMatrix gramian = [&] {
    try {
      return solve_discrete_lyapunov(a_cl);
    } catch (const UnstableMatrix&) {
      throw UnstableResult("extract_gain: Gramian recomputation failed");
    }
  }();
  const double trace = gramian.trace();
  return SynthesisResult{gain, std::move(gramian), trace};
}

double gramian_trace(const PlantModel& plant, const FeedbackGain& gain) {
  const RealMatrix a_cl = closed_loop(plant, gain);
  try {
    return solve_discrete_lyapunov(a_cl).trace();
  } catch (const UnstableMatrix&) {
    throw UnstableClosedLoop("gramian_trace: A_p + B_p F is not stable");
  }
}

RealMatrix solve_dare(const RealMatrix& a, const RealMatrix& b,
                      const RealMatrix& q, const RealMatrix& r) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != b.cols() || r.cols() != b.cols()) {
    throw DimensionMismatch("solve_dare: shapes must conform");
  }
  Eigen::LLT<RealMatrix> llt_r(r);
  if (llt_r.info() != Eigen::Success) {
    throw NotPositiveDefinite("solve_dare: R must be positive definite");
  }

  // Structure-preserving doubling on X = A^T X (I + G X)^{-1} A + Q with
  // G = B R^{-1} B^T; the H iterate converges quadratically to X.
  RealMatrix ak = a;
  RealMatrix g = b * llt_r.solve(b.transpose());
  RealMatrix h = q;
  const RealMatrix eye = RealMatrix::Identity(n, n);
  bool converged = false;
  for (int k = 0; k < 100; ++k) {
    Eigen::PartialPivLU<RealMatrix> lu(eye + g * h);
    const RealMatrix wi_a = lu.solve(ak);
    const RealMatrix wi_g = lu.solve(g);
    const RealMatrix h_next = h + ak.transpose() * h * wi_a;
    g += ak * wi_g * ak.transpose();
    g = 0.5 * (g + g.transpose());
    const double diff = (h_next - h).norm();
    h = 0.5 * (h_next + h_next.transpose());
    ak = ak * wi_a;
    if (diff <= 1e-14 * std::max(h.norm(), 1e-300)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergence("solve_dare: doubling iteration did not converge");
  }
  // Residual check against the Riccati operator itself.
  const RealMatrix btxb = r + b.transpose() * h * b;
  const RealMatrix k_gain =
      Eigen::LDLT<RealMatrix>(btxb).solve(b.transpose() * h * a);
  const RealMatrix residual =
      a.transpose() * h * a - a.transpose() * h * b * k_gain + q - h;
  // Near-singular control weights push kappa(I + G H) to ~1/r, which caps
  // the attainable accuracy around 1e-8 relative; 1e-6 still separates a
  // converged solve from a diverged one by many orders of magnitude.
  if (residual.norm() > 1e-6 * std::max(h.norm(), 1e-300)) {
    throw NonConvergence("solve_dare: residual above tolerance");
  }
  return h;
}

FeedbackGain lqr_gain(const PlantModel& plant, double control_weight) {
  const Eigen::Index n = plant.a_p.rows();
  const Eigen::Index m = plant.b_p.cols();
  const RealMatrix x =
      solve_dare(plant.a_p, plant.b_p, RealMatrix::Identity(n, n),
                 control_weight * RealMatrix::Identity(m, m));
  const RealMatrix btxb =
      control_weight * RealMatrix::Identity(m, m) +
      plant.b_p.transpose() * x * plant.b_p;
  const RealMatrix f = -Eigen::LDLT<RealMatrix>(btxb).solve(
      plant.b_p.transpose() * x * plant.a_p);
  return FeedbackGain{f};
}

}  // namespace ectrl
