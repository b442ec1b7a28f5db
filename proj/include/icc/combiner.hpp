#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "icc/config.hpp"
#include "icc/denoisers.hpp"
#include "icc/model.hpp"
#include "icc/nomographic.hpp"
#include "icc/types.hpp"

namespace icc {

// OTAC combiner: u_m = A^{-1} b_m with
//   A   = H (sigma_s^2 I + Omega) H^H + sigma_w^2 I
//   b_m = sigma_s^2 H p_m
// solved directly, through the matrix inversion lemma, or by Gaussian belief
// propagation over the dense N x N factor graph of A u = b.

struct CombinerSystem {
  CMatrix a;               ///< N x N, Hermitian
  std::vector<CVector> b;  ///< one right-hand side per stream
  CMatrix omega;           ///< K x K data-error covariance
  double sigma_s2 = 0.0;
  double noise_var = 0.0;

  int n() const { return static_cast<int>(a.rows()); }
};

/// Omega = Sigma^H Sigma from the N x K matrix of per-edge data error standard
/// deviations; the diagonal mode drops the cross terms.
inline CMatrix error_covariance(const RMatrix& sigma_d, OmegaMode mode = OmegaMode::as_printed) {
  RMatrix omega = sigma_d.transpose() * sigma_d;
  if (mode == OmegaMode::diagonal) omega = RMatrix(omega.diagonal().asDiagonal());
  return omega.cast<cplx>();
}

inline CombinerSystem build_normal_system(const ChannelRealization& ch, double sigma_s2, const CMatrix& omega,
                                          double noise_var, const std::vector<StreamSelector>& selectors) {
  const auto& h = ch.h;
  const Eigen::Index n = h.rows();
  const Eigen::Index k = h.cols();
  if (omega.rows() != k || omega.cols() != k) {
    throw ConfigError("build_normal_system: Omega must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  CombinerSystem sys;
  sys.omega = omega;
  sys.sigma_s2 = sigma_s2;
  sys.noise_var = noise_var;

  CMatrix c = omega;
  c.diagonal().array() += sigma_s2;
  const CMatrix hc = h * c;
  sys.a.resize(n, n);
  sys.a.noalias() = hc * h.adjoint();
  sys.a.diagonal().array() += noise_var;
  // exact Hermitian symmetry; the product above leaves rounding asymmetry
  for (Eigen::Index j = 0; j < n; ++j) {
    sys.a(j, j) = sys.a(j, j).real();
    for (Eigen::Index i = j + 1; i < n; ++i) sys.a(j, i) = std::conj(sys.a(i, j));
  }

  sys.b.reserve(selectors.size());
  for (const auto& sel : selectors) {
    if (sel.p.size() != k) throw ConfigError("build_normal_system: selector length mismatch");
    sys.b.push_back(sigma_s2 * (h * sel.p.cast<cplx>()));
  }
  return sys;
}

inline CVector solve_hermitian(const CMatrix& a, const CVector& rhs) {
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("combiner system is not positive definite");
  }
  return llt.solve(rhs);
}

inline CVector mmse_combiner_direct(const CombinerSystem& sys, std::size_t stream) {
  return solve_hermitian(sys.a, sys.b.at(stream));
}

/// Same solution via the matrix inversion lemma; costs O(N K^2 + K^3).
inline CVector mmse_combiner_woodbury(const ChannelRealization& ch, double sigma_s2, const CMatrix& omega,
                                      double noise_var, const CVector& b) {
  const auto& h = ch.h;
  const Eigen::Index k = h.cols();
  CMatrix c = omega;
  c.diagonal().array() += sigma_s2;
  Eigen::LLT<CMatrix> c_llt(c);
  if (c_llt.info() != Eigen::Success) {
    throw SingularSystemError("Woodbury combiner: sigma_s^2 I + Omega is singular");
  }
  CMatrix inner = noise_var * c_llt.solve(CMatrix::Identity(k, k));
  inner.noalias() += h.adjoint() * h;
  inner = (0.5 * (inner + inner.adjoint())).eval();
  const CVector x = solve_hermitian(inner, h.adjoint() * b);
  return (b - h * x) / noise_var;
}

struct LinearSolveResult {
  CVector u;
  bool diverged = false;
  int sweeps = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();  ///< ||A u - b||
};

struct GabpSolveOptions {
  PriorGaussian prior{{0.0, 0.0}, 1.0};
  double beta = 0.3;
  int i_max = 30;
  /// Consecutive residual increases that declare divergence.
  int divergence_patience = 5;
  /// Genie start: every replica row set to this vector with zero variance.
  std::optional<CVector> initial;
};

/// Per-edge replicas u_hat(n, n') of u_{n'} held by factor n.
struct CombinerEdgeState {
  CMatrix u_hat;
  RMatrix u_var;
  cplx mu_u_hat;
};

/// Solves A u = b by message passing: soft interference cancellation per
/// edge, leave-one-out extrinsic beliefs, Gaussian-prior denoising with an EM
/// estimate of the prior mean, damping, and a precision-weighted consensus.
/// The variance recursion carries interference only; the system is noiseless.
inline LinearSolveResult gabp_linear_solve(const CMatrix& a, const CVector& b, const GabpSolveOptions& opt) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n) throw ConfigError("gabp_linear_solve: dimension mismatch");

  const RMatrix a2 = a.cwiseAbs2();
  const double b_norm = b.norm();

  CombinerEdgeState st{CMatrix::Zero(n, n), RMatrix::Constant(n, n, opt.prior.var), opt.prior.mean};
  if (opt.initial) {
    if (opt.initial->size() != n) throw ConfigError("gabp_linear_solve: initial guess length mismatch");
    st.u_hat = opt.initial->transpose().replicate(n, 1);
    st.u_var.setConstant(kVarianceFloor);
  }

  RVector w(n);
  CVector z(n);
  RVector w_col(n);
  CVector z_col(n);
  LinearSolveResult res;
  res.u = CVector::Zero(n);
  double prev_residual = std::numeric_limits<double>::infinity();
  int increases = 0;

  for (int it = 1; it <= opt.i_max; ++it) {
    // soft interference cancellation
    const CVector r = (a.array() * st.u_hat.array()).rowwise().sum();
    const RVector t = (a2.array() * st.u_var.array()).rowwise().sum();
    // Column j's beliefs need only column j's sums, and r, t already hold the
    // previous sweep, so each column is cancelled, summed and denoised in one
    // pass; the working set stays at a, |a|^2 and the replicas.
    for (Eigen::Index j = 0; j < n; ++j) {
      double w_sum = 0.0;
      cplx z_sum{};
      for (Eigen::Index i = 0; i < n; ++i) {
        const cplx bt = b(i) - r(i) + a(i, j) * st.u_hat(i, j);
        const double var_ic = floor_variance(t(i) - a2(i, j) * st.u_var(i, j));
        w(i) = a2(i, j) / var_ic;
        z(i) = std::conj(a(i, j)) * bt / var_ic;
        w_sum += w(i);
        z_sum += z(i);
      }
      w_col(j) = w_sum;
      z_col(j) = z_sum;

      // extrinsic beliefs, denoising and damping
      for (Eigen::Index i = 0; i < n; ++i) {
        const double prec = w_sum - w(i);
        // no other factor informs this edge: fall back to the prior
        Denoised dn{st.mu_u_hat, opt.prior.var};
        if (prec > w_sum * 1e-14 && prec > 0.0) {
          const double v = 1.0 / prec;
          dn = gaussian_denoise({(z_sum - z(i)) * v, v}, {st.mu_u_hat, opt.prior.var});
        }
        st.u_hat(i, j) = damp(dn.estimate, st.u_hat(i, j), opt.beta);
        st.u_var(i, j) = floor_variance(damp(dn.var, st.u_var(i, j), opt.beta));
      }
    }
    st.mu_u_hat = em_update_mean(st.u_hat);

    for (Eigen::Index j = 0; j < n; ++j) res.u(j) = w_col(j) > 0.0 ? z_col(j) / w_col(j) : cplx{};
    res.sweeps = it;

    const double residual = (a * res.u - b).norm();
    res.residual = residual;
    if (!std::isfinite(residual) || !res.u.allFinite()) {
      res.diverged = true;
      break;
    }
    if (residual > prev_residual && residual > 1e-12 * b_norm) {
      if (++increases >= opt.divergence_patience) {
        res.diverged = true;
        break;
      }
    } else {
      increases = 0;
    }
    prev_residual = residual;
  }
  return res;
}

inline LinearSolveResult gabp_linear_solve(const CombinerSystem& sys, std::size_t stream, const PriorGaussian& prior,
                                           double beta_u, int i_max) {
  GabpSolveOptions opt;
  opt.prior = prior;
  opt.beta = beta_u;
  opt.i_max = i_max;
  return gabp_linear_solve(sys.a, sys.b.at(stream), opt);
}

/// f_hat = post(u^H (y - H d_hat)), optionally keeping the real part only.
inline cplx apply_combiner(const CVector& u, const RxSignal& rx, const ChannelRealization& ch, const CVector& d_hat,
                           NomographicKind kind, bool real_only) {
  const CVector residual = rx.y - ch.h * d_hat;
  cplx f = postprocess(kind, u.dot(residual));  // Eigen's dot conjugates the left operand
  if (real_only) f = f.real();
  return f;
}

struct CombinerOutcome {
  CVector u;
  bool gabp_diverged = false;
};

/// Dispatches on the configured solver. A diverged GaBP solve falls back to
/// the Woodbury form and reports the event.
inline CombinerOutcome solve_combiner(const CombinerSystem& sys, std::size_t stream, const ChannelRealization& ch,
                                      const SystemConfig& cfg, const std::optional<CVector>& genie = std::nullopt) {
  const CVector& b = sys.b.at(stream);
  if (b.isZero(0.0)) return {CVector::Zero(sys.n()), false};
  switch (cfg.solver_mode) {
    case SolverMode::direct:
      return {mmse_combiner_direct(sys, stream), false};
    case SolverMode::woodbury:
      return {mmse_combiner_woodbury(ch, sys.sigma_s2, sys.omega, sys.noise_var, b), false};
    case SolverMode::gabp: {
      GabpSolveOptions opt;
      opt.prior = {{0.0, 0.0}, cfg.sigma_u2};
      opt.beta = cfg.beta_u;
      opt.i_max = cfg.i_max;
      opt.initial = genie;
      auto r = gabp_linear_solve(sys.a, b, opt);
      if (r.diverged) return {mmse_combiner_woodbury(ch, sys.sigma_s2, sys.omega, sys.noise_var, b), true};
      return {std::move(r.u), false};
    }
  }
  throw ConfigError("unknown solver mode");
}

}  // namespace icc
