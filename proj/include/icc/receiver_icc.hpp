#pragma once

#include <optional>
#include <vector>

#include "icc/access.hpp"
#include "icc/combiner.hpp"
#include "icc/config.hpp"
#include "icc/denoisers.hpp"
#include "icc/model.hpp"
#include "icc/nomographic.hpp"
#include "icc/types.hpp"

namespace icc {

// Integrated receivers: a data-only GaBP that treats H s + w as colored
// effective noise, then one combiner solve per computing stream.

/// Diagonal of the effective-noise covariance under channel hardening.
struct EffectiveNoiseProfile {
  RVector per_antenna_var;
};

inline EffectiveNoiseProfile effective_noise_profile(const ChannelRealization& ch, double sigma_s2, double noise_var) {
  return {(sigma_s2 * ch.xi.array() + noise_var).matrix()};
}

struct DataStageResult {
  CVector d_hat;    ///< consensus estimates, length K
  RMatrix sigma_d;  ///< N x K final per-edge standard deviations
  int iterations = 0;
};

struct DataStageOptions {
  /// Genie start at the transmitted symbols with zero variance.
  std::optional<CVector> initial;
};

inline DataStageResult run_data_gabp(const RxSignal& rx, const ChannelRealization& ch,
                                     const EffectiveNoiseProfile& profile, const SystemConfig& cfg,
                                     const AccessConstraints& constraints, const DataStageOptions& opt = {}) {
  const CMatrix& h = ch.h;
  const Eigen::Index n = h.rows();
  const Eigen::Index k = h.cols();
  if (profile.per_antenna_var.size() != n) throw ConfigError("run_data_gabp: noise profile length mismatch");
  if (rx.y.size() != n) throw ConfigError("run_data_gabp: received vector length mismatch");
  if (static_cast<Eigen::Index>(constraints.force_zero_data.size()) != k) {
    throw ConfigError("run_data_gabp: constraint vector length mismatch");
  }

  const RMatrix h2 = h.cwiseAbs2();
  CMatrix d_hat = CMatrix::Zero(n, k);
  RMatrix d_var = RMatrix::Constant(n, k, cfg.data_power);
  if (opt.initial) {
    d_hat = opt.initial->transpose().replicate(n, 1);
    d_var.setZero();
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (constraints.pinned(j)) {
      d_hat.col(j).setZero();
      d_var.col(j).setZero();
    }
  }

  // Reductions run in plain index order so results do not depend on how a
  // vectorizing library would regroup the sums.
  CVector r(n);
  RVector t(n);
  RMatrix w(n, k);
  CMatrix z(n, k);
  RVector w_col(k);
  CVector z_col(k);

  for (int it = 1; it <= cfg.i_max; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      cplx ri{0.0, 0.0};
      double ti = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        ri += h(i, j) * d_hat(i, j);
        ti += h2(i, j) * d_var(i, j);
      }
      r(i) = ri;
      t(i) = ti;
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      double wj = 0.0;
      cplx zj{0.0, 0.0};
      for (Eigen::Index i = 0; i < n; ++i) {
        const cplx y_ic = rx.y(i) - r(i) + h(i, j) * d_hat(i, j);
        const double v_ic =
            floor_variance(std::max(t(i) - h2(i, j) * d_var(i, j), 0.0) + profile.per_antenna_var(i));
        w(i, j) = h2(i, j) / v_ic;
        z(i, j) = std::conj(h(i, j)) * y_ic / v_ic;
        wj += w(i, j);
        zj += z(i, j);
      }
      w_col(j) = wj;
      z_col(j) = zj;
    }

    for (Eigen::Index j = 0; j < k; ++j) {
      if (constraints.pinned(j)) continue;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double prec = w_col(j) - w(i, j);
        Denoised dn{{0.0, 0.0}, cfg.data_power};
        if (prec > 0.0 && prec > w_col(j) * 1e-14) {
          dn = qpsk_denoise({(z_col(j) - z(i, j)) / prec, 1.0 / prec}, cfg.data_power);
        }
        d_hat(i, j) = damp(dn.estimate, d_hat(i, j), cfg.beta_d);
        d_var(i, j) = floor_variance(damp(dn.var, d_var(i, j), cfg.beta_d));
      }
    }
    if (!d_hat.allFinite()) throw NumericalDivergence("data GaBP", it);
  }

  DataStageResult out;
  out.iterations = cfg.i_max;
  out.sigma_d = d_var.cwiseSqrt();
  if (cfg.weighted_consensus) {
    out.d_hat = (z_col.array() / w_col.array().cast<cplx>()).matrix();
  } else {
    out.d_hat.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      cplx acc{0.0, 0.0};
      for (Eigen::Index i = 0; i < n; ++i) acc += d_hat(i, j);
      out.d_hat(j) = acc / static_cast<double>(n);
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (constraints.pinned(j)) out.d_hat(j) = 0.0;
  }
  if (!out.d_hat.allFinite()) throw NumericalDivergence("data GaBP consensus", cfg.i_max);
  return out;
}

struct IccOutput {
  CVector d_hat;
  RMatrix sigma_d;
  CVector f_hat;  ///< one estimate per stream
  std::vector<bool> combiner_diverged;
};

namespace detail {

inline IccOutput run_icc_pipeline(const RxSignal& rx, const ChannelRealization& ch, const SystemConfig& cfg,
                                  const std::vector<StreamSelector>& selectors, const TransmitFrame* truth) {
  const double sigma_s2 = compute_power(cfg);
  const EffectiveNoiseProfile profile = effective_noise_profile(ch, sigma_s2, cfg.noise_var);
  DataStageOptions dopt;
  if (truth) dopt.initial = truth->d;
  DataStageResult data = run_data_gabp(rx, ch, profile, cfg, make_access_constraints(cfg), dopt);

  IccOutput out;
  out.d_hat = std::move(data.d_hat);
  out.sigma_d = std::move(data.sigma_d);

  const CMatrix omega = error_covariance(out.sigma_d, cfg.omega_mode);
  const CombinerSystem sys = build_normal_system(ch, sigma_s2, omega, cfg.noise_var, selectors);
  out.f_hat = CVector::Zero(static_cast<Eigen::Index>(selectors.size()));
  for (std::size_t m = 0; m < selectors.size(); ++m) {
    std::optional<CVector> genie_u;
    if (truth && cfg.solver_mode == SolverMode::gabp && !sys.b[m].isZero(0.0)) {
      genie_u = mmse_combiner_direct(sys, m);
    }
    const CombinerOutcome u = solve_combiner(sys, m, ch, cfg, genie_u);
    out.combiner_diverged.push_back(u.gabp_diverged);
    out.f_hat(static_cast<Eigen::Index>(m)) = apply_combiner(u.u, rx, ch, out.d_hat, cfg.function, cfg.real_only);
  }
  return out;
}

}  // namespace detail

inline IccOutput run_multi_stream(const RxSignal& rx, const ChannelRealization& ch, const SystemConfig& cfg,
                                  const std::vector<StreamSelector>& selectors) {
  for (const auto& s : selectors) {
    if (s.p.size() != ch.h.cols()) throw ConfigError("run_multi_stream: selector length mismatch");
  }
  return detail::run_icc_pipeline(rx, ch, cfg, selectors, nullptr);
}

inline IccOutput run_single_stream(const RxSignal& rx, const ChannelRealization& ch, const SystemConfig& cfg) {
  if (cfg.n_streams != 1) throw ConfigError("run_single_stream requires n_streams = 1");
  return detail::run_icc_pipeline(rx, ch, cfg, make_selectors(cfg), nullptr);
}

/// Matched-filter bound: the same pipeline started from the true symbols
/// (and, for the GaBP combiner, from the exact combiner).
inline IccOutput run_mf_bound(const RxSignal& rx, const ChannelRealization& ch, const SystemConfig& cfg,
                              const TransmitFrame& truth) {
  return detail::run_icc_pipeline(rx, ch, cfg, make_selectors(cfg), &truth);
}

}  // namespace icc
