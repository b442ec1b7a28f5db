#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "icc/config.hpp"
#include "icc/rng.hpp"
#include "icc/types.hpp"

namespace icc {

// Uplink signal model: y = H (d + s) + w over iid Rayleigh fading.

struct ChannelRealization {
  CMatrix h;   ///< N x K
  RVector xi;  ///< squared row norms of h

  int n_antennas() const { return static_cast<int>(h.rows()); }
  int n_users() const { return static_cast<int>(h.cols()); }
};

using BitPair = std::array<std::uint8_t, 2>;

struct TransmitFrame {
  std::vector<BitPair> bits;  ///< Gray bits per user, zero for compute_only users
  CVector d;                  ///< QPSK symbols, zero for compute_only users
  CVector s;                  ///< transmitted computing signal psi(s_k), zero for data_only users
  CVector s_raw;              ///< computing values before pre-processing (ground truth)
  double e_s = 0.0;           ///< per-user computing power
};

struct RxSignal {
  CVector y;
};

/// Equal power per data symbol and per aggregate computing stream.
inline double power_allocation(double data_power, int n_users) {
  return data_power / static_cast<double>(n_users);
}

/// Computing power actually used by a configuration: zero when no user
/// transmits a computing signal.
inline double compute_power(const SystemConfig& cfg) {
  return cfg.computing_users() > 0 ? power_allocation(cfg.data_power, cfg.n_users) : 0.0;
}

/// Gray labelling (b1 b2): 00 -> (+,+), 01 -> (+,-), 10 -> (-,+), 11 -> (-,-).
inline cplx qpsk_map(BitPair b, double data_power) {
  const double c = std::sqrt(data_power / 2.0);
  return {b[0] ? -c : c, b[1] ? -c : c};
}

inline BitPair qpsk_hard_bits(cplx symbol) {
  return {static_cast<std::uint8_t>(symbol.real() < 0.0), static_cast<std::uint8_t>(symbol.imag() < 0.0)};
}

inline RVector row_energy(const CMatrix& h) { return h.rowwise().squaredNorm(); }

inline ChannelRealization make_channel(CMatrix h) {
  ChannelRealization ch{std::move(h), {}};
  ch.xi = row_energy(ch.h);
  return ch;
}

inline ChannelRealization generate_channel(const SystemConfig& cfg, Rng& rng) {
  CMatrix h(cfg.n_antennas, cfg.n_users);
  // column-major fill: user by user
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    for (Eigen::Index n = 0; n < h.rows(); ++n) h(n, k) = complex_normal(rng, 1.0);
  }
  return make_channel(std::move(h));
}

/// Draws bits and a computing value for every user regardless of role, so a
/// user's draws do not depend on the roles of the others.
inline TransmitFrame generate_frame(const SystemConfig& cfg, Rng& rng) {
  const auto k = static_cast<Eigen::Index>(cfg.n_users);
  TransmitFrame f;
  f.e_s = compute_power(cfg);
  f.bits.assign(static_cast<std::size_t>(k), BitPair{0, 0});
  f.d = CVector::Zero(k);
  f.s = CVector::Zero(k);
  f.s_raw = CVector::Zero(k);
  const double es_draw = power_allocation(cfg.data_power, cfg.n_users);

  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    BitPair b{static_cast<std::uint8_t>(coin(rng)), static_cast<std::uint8_t>(coin(rng))};
    cplx s_val;
    cplx s_raw;
    if (cfg.function == NomographicKind::sum) {
      s_val = complex_normal(rng, es_draw);
      s_raw = s_val;
    } else {
      // positive real values whose base-2 logarithm has variance E_S
      const double g = std::sqrt(es_draw) * gauss(rng);
      s_val = g;
      s_raw = std::exp2(g);
    }
    const Role role = cfg.roles[idx];
    if (carries_data(role)) {
      f.bits[idx] = b;
      f.d(i) = qpsk_map(b, cfg.data_power);
    }
    if (carries_compute(role)) {
      f.s(i) = s_val;
      f.s_raw(i) = s_raw;
    }
  }
  return f;
}

inline RxSignal synthesize_rx(const ChannelRealization& ch, const TransmitFrame& frame, double noise_var,
                              Rng& rng) {
  if (ch.h.cols() != frame.d.size() || ch.h.cols() != frame.s.size()) {
    throw ConfigError("synthesize_rx: channel has " + std::to_string(ch.h.cols()) + " users, frame has " +
                      std::to_string(frame.d.size()));
  }
  RxSignal rx{ch.h * (frame.d + frame.s)};
  for (Eigen::Index n = 0; n < rx.y.size(); ++n) rx.y(n) += complex_normal(rng, noise_var);
  return rx;
}

/// One fully drawn trial: channel, payload and received vector.
struct TrialDraw {
  ChannelRealization channel;
  TransmitFrame frame;
  RxSignal rx;
};

inline TrialDraw draw_trial(const SystemConfig& cfg, std::uint64_t trial) {
  Rng ch_rng = make_rng(cfg.base_seed, trial, Substream::channel);
  Rng fr_rng = make_rng(cfg.base_seed, trial, Substream::frame);
  Rng nz_rng = make_rng(cfg.base_seed, trial, Substream::noise);
  TrialDraw t{generate_channel(cfg, ch_rng), generate_frame(cfg, fr_rng), {}};
  t.rx = synthesize_rx(t.channel, t.frame, cfg.noise_var, nz_rng);
  return t;
}

}  // namespace icc
