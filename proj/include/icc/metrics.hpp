#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "icc/config.hpp"
#include "icc/model.hpp"
#include "icc/types.hpp"

namespace icc {

struct BitCount {
  std::uint64_t errors = 0;
  std::uint64_t total = 0;
};

/// Hard decisions on the data estimates of every data-carrying user.
inline BitCount count_bit_errors(const CVector& d_hat, const TransmitFrame& truth, const std::vector<Role>& roles) {
  BitCount c;
  for (Eigen::Index k = 0; k < d_hat.size(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    if (!carries_data(roles[idx])) continue;
    const BitPair got = qpsk_hard_bits(d_hat(k));
    c.errors += static_cast<std::uint64_t>(got[0] != truth.bits[idx][0]) +
                static_cast<std::uint64_t>(got[1] != truth.bits[idx][1]);
    c.total += 2;
  }
  return c;
}

/// Bit error rate; NaN marks an undefined rate (no data bits at all).
inline double ber(std::uint64_t errors, std::uint64_t total) {
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(errors) / static_cast<double>(total);
}

inline double ber(const std::vector<BitPair>& decided, const std::vector<BitPair>& truth) {
  if (decided.size() != truth.size()) throw ConfigError("ber: length mismatch");
  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < decided.size(); ++i) {
    errors += static_cast<std::uint64_t>(decided[i][0] != truth[i][0]) +
              static_cast<std::uint64_t>(decided[i][1] != truth[i][1]);
  }
  return ber(errors, 2 * decided.size());
}

/// ||f - f_hat||^2 / K.
inline double nmse(const CVector& f_hat, const CVector& f_true, int n_users) {
  if (f_hat.size() != f_true.size()) throw ConfigError("nmse: length mismatch");
  return (f_true - f_hat).squaredNorm() / static_cast<double>(n_users);
}

/// E||H s||^2 for iid unit-variance channels.
inline double computing_signal_energy(const SystemConfig& cfg) {
  return static_cast<double>(cfg.n_antennas) * cfg.computing_users() *
         power_allocation(cfg.data_power, cfg.n_users);
}

inline double data_signal_energy(const SystemConfig& cfg) {
  return static_cast<double>(cfg.n_antennas) * cfg.data_users() * cfg.data_power;
}

/// Noise variance giving the requested computing SNR, M E||Hs||^2 / sigma_w^2,
/// with E||Hs||^2 = N K E_S = N E_D regardless of the role split.
inline double snr_to_noise_var(double snr_s_db, const SystemConfig& cfg) {
  return cfg.n_streams * cfg.n_antennas * cfg.data_power / std::pow(10.0, snr_s_db / 10.0);
}

/// Data SINR; alpha_s = 1 when the computing signal is left as interference.
inline double sinr_d(const SystemConfig& cfg, double noise_var, int alpha_s) {
  return data_signal_energy(cfg) / (alpha_s * cfg.n_streams * computing_signal_energy(cfg) + noise_var);
}

/// Average bit error probability of Gray QPSK with n_branches-fold maximal
/// ratio combining in iid Rayleigh fading. snr_per_branch is E_D / sigma_w^2
/// per antenna, so each bit sees half of it.
inline double analytic_mrc_qpsk_ber(int n_branches, double snr_per_branch) {
  if (n_branches < 1) throw ConfigError("analytic_mrc_qpsk_ber: need at least one branch");
  const double gamma_b = snr_per_branch / 2.0;
  const double mu = std::sqrt(gamma_b / (1.0 + gamma_b));
  const double lo = 0.5 * (1.0 - mu);
  const double hi = 0.5 * (1.0 + mu);
  double sum = 0.0;
  double binom = 1.0;  // C(L-1+l, l)
  double hi_pow = 1.0;
  for (int l = 0; l < n_branches; ++l) {
    if (l > 0) binom *= static_cast<double>(n_branches - 1 + l) / static_cast<double>(l);
    sum += binom * hi_pow;
    hi_pow *= hi;
  }
  return std::pow(lo, n_branches) * sum;
}

struct Interval {
  double lo;
  double hi;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // the closed-form endpoints at p = 0 and p = 1 are exact; avoid cancellation residue
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - spread);
  const double hi = successes == trials ? 1.0 : std::min(1.0, center + spread);
  return {lo, hi};
}

/// Per-trial outcome. Aggregates must be fed in trial-index order; the NMSE
/// sum is not associative in floating point.
struct TrialMetrics {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  double nmse_num = 0.0;  ///< ||f - f_hat||^2 summed over streams
  int streams = 0;
  int n_users = 1;
  bool combiner_diverged = false;
  bool numerically_diverged = false;

  double nmse() const { return nmse_num / static_cast<double>(n_users); }
};

struct AggregateMetrics {
  std::uint64_t trials = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_total = 0;
  std::uint64_t diverged = 0;
  std::uint64_t nmse_samples = 0;
  double nmse_sum = 0.0;
  double nmse_sq_sum = 0.0;

  void add(const TrialMetrics& t) {
    ++trials;
    bit_errors += t.bit_errors;
    bits_total += t.bits_total;
    if (t.combiner_diverged || t.numerically_diverged) ++diverged;
    if (!t.numerically_diverged && t.streams > 0) {
      ++nmse_samples;
      const double e = t.nmse();
      nmse_sum += e;
      nmse_sq_sum += e * e;
    }
  }

  double ber() const { return icc::ber(bit_errors, bits_total); }
  double ber_ci95() const { return wilson_interval(bit_errors, bits_total).half_width(); }
  double nmse() const {
    return nmse_samples ? nmse_sum / static_cast<double>(nmse_samples) : std::numeric_limits<double>::quiet_NaN();
  }
  /// Normal-approximation 95% half-width of the mean NMSE.
  double nmse_ci95() const {
    if (nmse_samples < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(nmse_samples);
    const double mean = nmse_sum / n;
    const double var = std::max(0.0, (nmse_sq_sum - n * mean * mean) / (n - 1.0));
    return 1.959963984540054 * std::sqrt(var / n);
  }
  double diverged_fraction() const {
    return trials ? static_cast<double>(diverged) / static_cast<double>(trials) : 0.0;
  }
};

inline double to_db(double x) {
  return x > 0.0 ? 10.0 * std::log10(x) : -std::numeric_limits<double>::infinity();
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("spearman: need two equal-length samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace icc
