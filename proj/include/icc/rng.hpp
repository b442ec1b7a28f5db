#pragma once

#include <cstdint>
#include <random>

#include "icc/types.hpp"

namespace icc {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Substream tags keep channel, payload and noise draws independent of each
/// other, so changing the noise level never perturbs H, d or s.
enum class Substream : std::uint64_t {
  channel = 0x43484e4cULL,
  frame = 0x46524d45ULL,
  noise = 0x4e4f4953ULL,
};

constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial,
                                    Substream tag) noexcept {
  return mix64(mix64(mix64(base_seed) ^ trial) ^ static_cast<std::uint64_t>(tag));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t trial, Substream tag) {
  return Rng(derive_seed(base_seed, trial, tag));
}

/// Circularly symmetric complex Gaussian with E|z|^2 = variance.
inline cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double scale = std::sqrt(variance / 2.0);
  const double re = g(rng);
  const double im = g(rng);
  return {scale * re, scale * im};
}

}  // namespace icc
