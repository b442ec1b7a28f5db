#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "icc/access.hpp"
#include "icc/combiner.hpp"
#include "icc/config.hpp"
#include "icc/denoisers.hpp"
#include "icc/model.hpp"
#include "icc/nomographic.hpp"
#include "icc/types.hpp"

namespace icc {

// Benchmark receiver: joint GaBP over every individual d_k and s_k, followed
// by the closed-form OTAC combiner on the data-cancelled residual.

struct GabpState {
  CMatrix d_hat;  ///< N x K per-edge data replicas
  CMatrix s_hat;  ///< N x K per-edge computing replicas
  RMatrix d_var;
  RMatrix s_var;
  cplx mu_s_hat{0.0, 0.0};
  int iteration = 0;

  // Consensus quantities from the most recent sweep.
  CVector d_consensus;
  CVector s_consensus;
};

inline GabpState benchmark_initial_state(const SystemConfig& cfg) {
  const Eigen::Index n = cfg.n_antennas;
  const Eigen::Index k = cfg.n_users;
  GabpState st;
  st.d_hat = CMatrix::Zero(n, k);
  st.s_hat = CMatrix::Zero(n, k);
  st.d_var = RMatrix::Constant(n, k, cfg.data_power);
  st.s_var = RMatrix::Constant(n, k, compute_power(cfg));
  st.d_consensus = CVector::Zero(k);
  st.s_consensus = CVector::Zero(k);
  const AccessConstraints pins = make_access_constraints(cfg);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (pins.pinned(j)) st.d_var.col(j).setZero();
    if (!carries_compute(cfg.roles[static_cast<std::size_t>(j)])) st.s_var.col(j).setZero();
  }
  return st;
}

/// Genie start: every replica at the transmitted value with zero variance.
inline GabpState benchmark_genie_state(const SystemConfig& cfg, const TransmitFrame& truth) {
  GabpState st = benchmark_initial_state(cfg);
  st.d_hat = truth.d.transpose().replicate(cfg.n_antennas, 1);
  st.s_hat = truth.s.transpose().replicate(cfg.n_antennas, 1);
  st.d_var.setZero();
  st.s_var.setZero();
  st.d_consensus = truth.d;
  st.s_consensus = truth.s;
  return st;
}

/// One sweep over all N x K edges. Leave-one-out sums are formed as the full
/// sum minus the own term, so a sweep costs O(NK).
inline GabpState benchmark_iteration(const GabpState& prev, const RxSignal& rx, const ChannelRealization& ch,
                                     const SystemConfig& cfg) {
  const CMatrix& h = ch.h;
  const Eigen::Index n = h.rows();
  const Eigen::Index k = h.cols();
  if (prev.d_hat.rows() != n || prev.d_hat.cols() != k || rx.y.size() != n) {
    throw ConfigError("benchmark_iteration: state dimensions do not match the channel");
  }
  const RMatrix h2 = h.cwiseAbs2();
  const double sigma_s2 = compute_power(cfg);
  const double nv = cfg.noise_var;
  const AccessConstraints pins = make_access_constraints(cfg);

  const CVector rd = (h.array() * prev.d_hat.array()).rowwise().sum();
  const CVector rs = (h.array() * prev.s_hat.array()).rowwise().sum();
  const RVector td = (h2.array() * prev.d_var.array()).rowwise().sum();
  const RVector ts = (h2.array() * prev.s_var.array()).rowwise().sum();

  // soft interference cancellation and its conditional variances
  CMatrix yd(n, k), ys(n, k);
  RMatrix vd(n, k), vs(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      yd(i, j) = rx.y(i) - rd(i) + h(i, j) * prev.d_hat(i, j) - rs(i);
      ys(i, j) = rx.y(i) - rs(i) + h(i, j) * prev.s_hat(i, j) - rd(i);
      vd(i, j) = floor_variance(std::max(td(i) - h2(i, j) * prev.d_var(i, j), 0.0) + ts(i) + nv);
      vs(i, j) = floor_variance(std::max(ts(i) - h2(i, j) * prev.s_var(i, j), 0.0) + td(i) + nv);
    }
  }
  const RMatrix wd = h2.array() / vd.array();
  const RMatrix ws = h2.array() / vs.array();
  const CMatrix zd = (h.conjugate().array() * yd.array()) / vd.array().cast<cplx>();
  const CMatrix zs = (h.conjugate().array() * ys.array()) / vs.array().cast<cplx>();
  const RVector wd_col = wd.colwise().sum();
  const RVector ws_col = ws.colwise().sum();
  const CVector zd_col = zd.colwise().sum();
  const CVector zs_col = zs.colwise().sum();

  GabpState next = prev;
  next.iteration = prev.iteration + 1;
  const PriorGaussian s_prior{prev.mu_s_hat, sigma_s2};
  std::vector<cplx> computing_consensus;

  for (Eigen::Index j = 0; j < k; ++j) {
    const bool pinned = pins.pinned(j);
    const bool computes = carries_compute(cfg.roles[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pinned) {
        next.d_hat(i, j) = 0.0;
        next.d_var(i, j) = 0.0;
      } else {
        const double prec = wd_col(j) - wd(i, j);
        Denoised dn{{0.0, 0.0}, cfg.data_power};
        if (prec > 0.0 && prec > wd_col(j) * 1e-14) {
          dn = qpsk_denoise({(zd_col(j) - zd(i, j)) / prec, 1.0 / prec}, cfg.data_power);
        }
        next.d_hat(i, j) = damp(dn.estimate, prev.d_hat(i, j), cfg.beta_d);
        next.d_var(i, j) = floor_variance(damp(dn.var, prev.d_var(i, j), cfg.beta_d));
      }

      if (!computes) {
        next.s_hat(i, j) = 0.0;
        next.s_var(i, j) = 0.0;
        continue;
      }
      const double prec_s = ws_col(j) - ws(i, j);
      Denoised ds{s_prior.mean, s_prior.var};
      if (prec_s > 0.0 && prec_s > ws_col(j) * 1e-14) {
        ds = gaussian_denoise({(zs_col(j) - zs(i, j)) / prec_s, 1.0 / prec_s}, s_prior);
      }
      next.s_hat(i, j) = damp(ds.estimate, prev.s_hat(i, j), cfg.beta_s);
      next.s_var(i, j) = floor_variance(damp(ds.var, prev.s_var(i, j), cfg.beta_s));
    }
    next.d_consensus(j) = pinned ? cplx{} : zd_col(j) / wd_col(j);
    next.s_consensus(j) = computes ? zs_col(j) / ws_col(j) : cplx{};
    if (computes) computing_consensus.push_back(next.s_consensus(j));
  }
  // users without a computing role have no computing node and do not inform the mean
  if (!computing_consensus.empty()) next.mu_s_hat = em_update_mean(std::span<const cplx>(computing_consensus));

  if (!next.d_hat.allFinite() || !next.s_hat.allFinite() || !next.d_consensus.allFinite() ||
      !next.s_consensus.allFinite()) {
    throw NumericalDivergence("benchmark GaBP", next.iteration);
  }
  return next;
}

struct BenchmarkOutput {
  CVector d_hat;
  CVector s_hat;
  RMatrix sigma_d;  ///< final per-edge data error standard deviations
  CVector f_hat;    ///< one estimate per stream
  std::vector<bool> combiner_diverged;
};

inline BenchmarkOutput run_benchmark(const RxSignal& rx, const ChannelRealization& ch, const SystemConfig& cfg,
                                     const std::optional<TransmitFrame>& genie = std::nullopt) {
  GabpState st = genie ? benchmark_genie_state(cfg, *genie) : benchmark_initial_state(cfg);
  for (int i = 0; i < cfg.i_max; ++i) st = benchmark_iteration(st, rx, ch, cfg);

  BenchmarkOutput out;
  out.d_hat = st.d_consensus;
  out.s_hat = st.s_consensus;
  out.sigma_d = st.d_var.cwiseSqrt();

  const auto selectors = make_selectors(cfg);
  const CMatrix omega = error_covariance(out.sigma_d, cfg.omega_mode);
  const CombinerSystem sys = build_normal_system(ch, compute_power(cfg), omega, cfg.noise_var, selectors);
  out.f_hat = CVector::Zero(static_cast<Eigen::Index>(selectors.size()));
  for (std::size_t m = 0; m < selectors.size(); ++m) {
    const CombinerOutcome u = solve_combiner(sys, m, ch, cfg);
    out.combiner_diverged.push_back(u.gabp_diverged);
    out.f_hat(static_cast<Eigen::Index>(m)) = apply_combiner(u.u, rx, ch, out.d_hat, cfg.function, cfg.real_only);
  }
  return out;
}

}  // namespace icc
