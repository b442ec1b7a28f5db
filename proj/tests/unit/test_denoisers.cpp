#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support.hpp"

namespace icc {
namespace {

TEST(QpskDenoise, UninformativeBeliefGivesZero) {
  const Denoised d = qpsk_denoise({cplx(0.7, -0.2), 1e300}, 2.0);
  EXPECT_NEAR(std::abs(d.estimate), 0.0, 1e-200);
  EXPECT_DOUBLE_EQ(d.var, 2.0);
}

TEST(QpskDenoise, SharpBeliefSaturates) {
  const double c = std::sqrt(0.5);
  const Denoised d = qpsk_denoise({cplx(c, c), 1e-6}, 1.0);
  EXPECT_NEAR(std::abs(d.estimate - cplx(c, c)), 0.0, 1e-12);
  EXPECT_NEAR(d.var, 0.0, 1e-12);
}

TEST(QpskDenoise, MatchesBruteForcePosteriorMean) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_real_distribution<double> logv(-1.5, 1.5);
  for (double ed : {0.5, 1.0, 3.0}) {
    const auto pts = testing::qpsk_points(ed);
    for (int rep = 0; rep < 2000; ++rep) {
      const cplx mean{unif(rng), unif(rng)};
      const double var = std::pow(10.0, logv(rng));
      cplx num{};
      double den = 0.0;
      for (const cplx& q : pts) {
        const double w = std::exp(-std::norm(mean - q) / var);
        num += w * q;
        den += w;
      }
      const cplx oracle = num / den;
      const Denoised d = qpsk_denoise({mean, var}, ed);
      EXPECT_NEAR(std::abs(d.estimate - oracle), 0.0, 1e-10) << "mean=" << mean << " var=" << var;
      EXPECT_NEAR(d.var, ed - std::norm(oracle), 1e-10);
    }
  }
}

TEST(QpskDenoise, OutputStaysInsideConstellationBox) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 5.0);
  const double c = std::sqrt(0.5);
  for (int rep = 0; rep < 10000; ++rep) {
    const Denoised d = qpsk_denoise({cplx(g(rng), g(rng)), std::exp(g(rng) / 2.0)}, 1.0);
    EXPECT_LE(std::abs(d.estimate.real()), c);
    EXPECT_LE(std::abs(d.estimate.imag()), c);
    EXPECT_GE(d.var, 0.0);
    EXPECT_LE(d.var, 1.0);
  }
}

TEST(GaussianDenoise, Examples) {
  const Denoised forced = gaussian_denoise({2.0, 1.0}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(forced.estimate.real(), 1.0);
  EXPECT_DOUBLE_EQ(forced.var, 0.5);

  const Denoised flat = gaussian_denoise({cplx(0.3, 0.4), 0.1}, {cplx(5, 5), 1e12});
  EXPECT_NEAR(std::abs(flat.estimate - cplx(0.3, 0.4)), 0.0, 1e-9);

  const Denoised vague = gaussian_denoise({cplx(9, 9), 1e12}, {cplx(1, -1), 0.2});
  EXPECT_NEAR(std::abs(vague.estimate - cplx(1, -1)), 0.0, 1e-9);
  EXPECT_NEAR(vague.var, 0.2, 1e-9);
}

TEST(GaussianDenoise, DegenerateInputThrows) {
  EXPECT_THROW(gaussian_denoise({1.0, 0.0}, {0.0, 0.0}), DegenerateInputError);
}

TEST(GaussianDenoise, VarianceBoundedAndMonotoneInBeliefVariance) {
  const PriorGaussian prior{0.0, 0.7};
  double last = 0.0;
  for (double v = 1e-6; v < 1e6; v *= 1.7) {
    const double var = gaussian_denoise({1.0, v}, prior).var;
    EXPECT_GT(var, 0.0);
    EXPECT_LE(var, prior.var);
    EXPECT_GT(var, last);
    last = var;
  }
}

TEST(Damp, Examples) {
  EXPECT_DOUBLE_EQ(damp(2.0, 0.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(damp(3.5, 3.5, 0.3), 3.5);
  EXPECT_NEAR(damp(7.0, -4.0, 1.0 - 1e-12), 7.0, 1e-10);
  EXPECT_EQ(damp(cplx(2, 2), cplx(0, 0), 0.5), cplx(1, 1));
}

TEST(Damp, PreservesConvexBounds) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), b(1e-6, 1.0 - 1e-6);
  for (int rep = 0; rep < 10000; ++rep) {
    const double x = damp(u(rng), u(rng), b(rng));
    EXPECT_LE(x, 1.0);
    EXPECT_GE(x, -1.0);
  }
}

TEST(EmUpdateMean, Examples) {
  const std::vector<cplx> two{cplx(1, 1), cplx(3, -1)};
  EXPECT_EQ(em_update_mean(std::span<const cplx>(two)), cplx(2, 0));
  EXPECT_EQ(em_update_mean(CVector(CVector::Constant(9, cplx(0.25, -1)))), cplx(0.25, -1));
  EXPECT_THROW(em_update_mean(CVector()), DegenerateInputError);
  EXPECT_THROW(em_update_mean(std::span<const cplx>()), DegenerateInputError);
}

TEST(EmUpdateMean, ConcentratesAroundTrueMean) {
  Rng rng = make_rng(77, 0, Substream::frame);
  const cplx mu{0.4, -0.9};
  CVector draws(1000);
  for (Eigen::Index i = 0; i < 1000; ++i) draws(i) = mu + complex_normal(rng, 1.0);
  // each component has standard error sqrt(0.5 / 1000)
  const cplx est = em_update_mean(draws);
  EXPECT_NEAR(est.real(), mu.real(), 3.0 * std::sqrt(0.5 / 1000));
  EXPECT_NEAR(est.imag(), mu.imag(), 3.0 * std::sqrt(0.5 / 1000));
}

TEST(FloorVariance, ClampsAtFloor) {
  EXPECT_EQ(floor_variance(0.0), kVarianceFloor);
  EXPECT_EQ(floor_variance(-3.0), kVarianceFloor);
  EXPECT_EQ(floor_variance(0.5), 0.5);
}

}  // namespace
}  // namespace icc
