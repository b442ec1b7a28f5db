#pragma once

#include <complex>
#include <random>

#include "icc/icc.hpp"

namespace icc::testing {

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng, double variance = 1.0) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng, variance);
  }
  return m;
}

inline RMatrix random_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  RMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  }
  return m;
}

inline StreamSelector ones(Eigen::Index k) { return {RVector::Ones(k), 1}; }

/// Random combiner system with computing power 1/K and data-error stds
/// drawn uniformly from [0, max_std].
struct Instance {
  ChannelRealization ch;
  RMatrix sigma_d;
  CMatrix omega;
  CombinerSystem sys;
};

inline Instance random_instance(int n, int k, double noise_var, double max_std, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0, Substream::channel);
  Instance in;
  in.ch = make_channel(random_complex(n, k, rng));
  in.sigma_d = random_uniform(n, k, rng, 0.0, max_std);
  in.omega = error_covariance(in.sigma_d);
  in.sys = build_normal_system(in.ch, 1.0 / k, in.omega, noise_var, {ones(k)});
  return in;
}

inline double relative_error(const CVector& got, const CVector& want) { return (got - want).norm() / want.norm(); }

inline std::array<cplx, 4> qpsk_points(double data_power) {
  return {qpsk_map({0, 0}, data_power), qpsk_map({0, 1}, data_power), qpsk_map({1, 0}, data_power),
          qpsk_map({1, 1}, data_power)};
}

/// Exhaustive ML decision over all 4^K QPSK hypotheses under a diagonal
/// Gaussian noise covariance.
inline CVector ml_qpsk(const CVector& y, const CMatrix& h, const RVector& noise_var, double data_power) {
  const auto pts = qpsk_points(data_power);
  const Eigen::Index k = h.cols();
  std::size_t hyps = 1;
  for (Eigen::Index i = 0; i < k; ++i) hyps *= 4;
  CVector best(k), cand(k);
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < hyps; ++code) {
    std::size_t c = code;
    for (Eigen::Index i = 0; i < k; ++i, c /= 4) cand(i) = pts[c % 4];
    const double metric = ((y - h * cand).cwiseAbs2().array() / noise_var.array()).sum();
    if (metric < best_metric) {
      best_metric = metric;
      best = cand;
    }
  }
  return best;
}

/// Exhaustive ML decision under a full noise-plus-interference covariance.
inline CVector ml_qpsk_full(const CVector& y, const CMatrix& h, const CMatrix& covariance, double data_power) {
  const auto pts = qpsk_points(data_power);
  const Eigen::LLT<CMatrix> llt(covariance);
  const CVector wy = llt.matrixL().solve(y);
  const CMatrix wh = llt.matrixL().solve(h);
  const Eigen::Index k = h.cols();
  std::size_t hyps = 1;
  for (Eigen::Index i = 0; i < k; ++i) hyps *= 4;
  CVector best(k), cand(k);
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < hyps; ++code) {
    std::size_t c = code;
    for (Eigen::Index i = 0; i < k; ++i, c /= 4) cand(i) = pts[c % 4];
    const double metric = (wy - wh * cand).squaredNorm();
    if (metric < best_metric) {
      best_metric = metric;
      best = cand;
    }
  }
  return best;
}

}  // namespace icc::testing
