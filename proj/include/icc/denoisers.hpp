#pragma once

#include <cmath>
#include <span>

#include "icc/types.hpp"

namespace icc {

/// Extrinsic Gaussian belief about one variable.
struct BeliefScalar {
  cplx mean;
  double var;
};

struct PriorGaussian {
  cplx mean;
  double var;
};

struct Denoised {
  cplx estimate;
  double var;
};

/// Posterior mean of a Gray QPSK symbol with per-axis amplitude sqrt(E_D/2)
/// given a belief CN(mean, var). The returned variance is E_D - |estimate|^2,
/// clamped at zero against rounding.
inline Denoised qpsk_denoise(const BeliefScalar& b, double data_power) {
  const double c = std::sqrt(data_power / 2.0);
  const double gain = 2.0 * c / b.var;
  const cplx est{c * std::tanh(gain * b.mean.real()), c * std::tanh(gain * b.mean.imag())};
  return {est, std::max(data_power - std::norm(est), 0.0)};
}

/// Product of a Gaussian belief with a Gaussian prior.
inline Denoised gaussian_denoise(const BeliefScalar& b, const PriorGaussian& prior) {
  const double total = b.var + prior.var;
  if (!(total > 0.0)) throw DegenerateInputError("gaussian_denoise: belief and prior variances are both zero");
  return {(prior.var * b.mean + b.var * prior.mean) / total, prior.var * b.var / total};
}

template <class T>
constexpr T damp(const T& fresh, const T& previous, double beta) {
  return beta * fresh + (1.0 - beta) * previous;
}

/// EM re-estimate of an unknown prior mean: the average of the current estimates.
inline cplx em_update_mean(std::span<const cplx> estimates) {
  if (estimates.empty()) throw DegenerateInputError("em_update_mean: no estimates");
  cplx acc{0.0, 0.0};
  for (const cplx& e : estimates) acc += e;
  return acc / static_cast<double>(estimates.size());
}

inline cplx em_update_mean(const CMatrix& estimates) {
  return em_update_mean(std::span<const cplx>(estimates.data(), static_cast<std::size_t>(estimates.size())));
}

inline cplx em_update_mean(const CVector& estimates) {
  return em_update_mean(std::span<const cplx>(estimates.data(), static_cast<std::size_t>(estimates.size())));
}

inline double floor_variance(double v) { return v > kVarianceFloor ? v : kVarianceFloor; }

}  // namespace icc
