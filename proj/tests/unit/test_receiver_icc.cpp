#include <gtest/gtest.h>

#include "reference_detector.hpp"
#include "support.hpp"

namespace icc {
namespace {

SystemConfig icc_config(int n, int k, int m = 1) {
  SystemConfig cfg = make_config(n, k, m);
  cfg.algorithm = m == 1 ? Algorithm::single_stream : Algorithm::multi_stream;
  return cfg;
}

TEST(EffectiveNoiseProfile, Examples) {
  const ChannelRealization one = make_channel(CMatrix::Ones(1, 1));
  EXPECT_DOUBLE_EQ(effective_noise_profile(one, 0.5, 1.0).per_antenna_var(0), 1.5);

  Rng rng = make_rng(1, 0, Substream::channel);
  const ChannelRealization ch = make_channel(testing::random_complex(9, 5, rng));
  EXPECT_EQ(effective_noise_profile(ch, 0.0, 0.3).per_antenna_var, RVector::Constant(9, 0.3));
}

TEST(EffectiveNoiseProfile, MatchesDiagonalOfFullCovariance) {
  Rng rng = make_rng(2, 0, Substream::channel);
  const ChannelRealization ch = make_channel(testing::random_complex(20, 13, rng));
  const double ss = 0.07, nv = 0.4;
  const CMatrix full = ss * ch.h * ch.h.adjoint() + nv * CMatrix::Identity(20, 20);
  const RVector prof = effective_noise_profile(ch, ss, nv).per_antenna_var;
  for (Eigen::Index n = 0; n < 20; ++n) {
    EXPECT_NEAR(prof(n), full(n, n).real(), 1e-12 * full(n, n).real());
    EXPECT_GE(prof(n), nv);
  }
}

TEST(RunDataGabp, NoiselessSingleUserRecoversSymbols) {
  SystemConfig cfg = icc_config(8, 1);
  set_role_counts(cfg, 1, 0, 0);
  cfg.noise_var = 1e-9;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const DataStageResult r = run_data_gabp(t.rx, t.channel, effective_noise_profile(t.channel, 0.0, cfg.noise_var),
                                            cfg, make_access_constraints(cfg));
    ASSERT_EQ(qpsk_hard_bits(r.d_hat(0)), t.frame.bits[0]) << "trial " << trial;
    EXPECT_NEAR(std::abs(r.d_hat(0) - t.frame.d(0)), 0.0, 1e-3);
  }
}

TEST(RunDataGabp, FullyPinnedSystemReturnsZeros) {
  SystemConfig cfg = icc_config(8, 3);
  set_role_counts(cfg, 0, 3, 0);
  cfg.noise_var = 0.1;
  const TrialDraw t = draw_trial(cfg, 0);
  const DataStageResult r = run_data_gabp(
      t.rx, t.channel, effective_noise_profile(t.channel, compute_power(cfg), cfg.noise_var), cfg,
      make_access_constraints(cfg));
  EXPECT_TRUE(r.d_hat.isZero(0.0));
  EXPECT_TRUE(r.sigma_d.isZero(0.0));
}

TEST(RunDataGabp, AgreesWithEffectiveNoiseMl) {
  SystemConfig cfg = icc_config(16, 2);
  cfg.noise_var = 0.02;
  const double ss = compute_power(cfg);
  int agree = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const EffectiveNoiseProfile prof = effective_noise_profile(t.channel, ss, cfg.noise_var);
    const DataStageResult r = run_data_gabp(t.rx, t.channel, prof, cfg, make_access_constraints(cfg));
    const CVector ml = testing::ml_qpsk(t.rx.y, t.channel.h, prof.per_antenna_var, cfg.data_power);
    bool same = true;
    for (Eigen::Index k = 0; k < 2; ++k) same = same && qpsk_hard_bits(r.d_hat(k)) == qpsk_hard_bits(ml(k));
    agree += same;
  }
  EXPECT_GE(agree, 950);
}

TEST(RunDataGabp, InputLengthsAreChecked) {
  SystemConfig cfg = icc_config(6, 2);
  const TrialDraw t = draw_trial(cfg, 0);
  EXPECT_THROW(run_data_gabp(t.rx, t.channel, {RVector::Ones(5)}, cfg, make_access_constraints(cfg)), ConfigError);
  EXPECT_THROW(run_data_gabp(t.rx, t.channel, {RVector::Ones(6)}, cfg, no_constraints(3)), ConfigError);
}

TEST(RunDataGabp, ReducesToReferenceDetectorWithoutComputing) {
  SystemConfig cfg = icc_config(24, 12);
  set_role_counts(cfg, 12, 0, 0);
  cfg.noise_var = snr_to_noise_var(5.0, cfg);
  ASSERT_EQ(compute_power(cfg), 0.0);
  testing::ReferenceDetectorParams p;
  p.data_power = cfg.data_power;
  p.noise_var = cfg.noise_var;
  p.beta = cfg.beta_d;
  p.iterations = cfg.i_max;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const IccOutput out = run_single_stream(t.rx, t.channel, cfg);
    const std::vector<cplx> y(t.rx.y.data(), t.rx.y.data() + t.rx.y.size());
    const std::vector<cplx> h(t.channel.h.data(), t.channel.h.data() + t.channel.h.size());
    const auto ref = testing::reference_gabp_qpsk(y, h, 24, 12, p);
    for (Eigen::Index k = 0; k < 12; ++k) EXPECT_EQ(out.d_hat(k), ref[static_cast<std::size_t>(k)]);
  }
}

TEST(RunSingleStream, MatchesMultiStreamWithTheSameSelector) {
  SystemConfig cfg = icc_config(16, 8);
  cfg.noise_var = snr_to_noise_var(10.0, cfg);
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const IccOutput a = run_single_stream(t.rx, t.channel, cfg);
    const IccOutput b = run_multi_stream(t.rx, t.channel, cfg, make_selectors(cfg));
    EXPECT_EQ(a.d_hat, b.d_hat);
    EXPECT_EQ(a.f_hat, b.f_hat);
    EXPECT_EQ(a.sigma_d, b.sigma_d);
  }
}

TEST(RunSingleStream, RejectsMultipleStreams) {
  SystemConfig cfg = icc_config(8, 4, 2);
  const TrialDraw t = draw_trial(cfg, 0);
  EXPECT_THROW(run_single_stream(t.rx, t.channel, cfg), ConfigError);
}

TEST(RunSingleStream, PaperScaleRunCompletesWithFiniteNmse) {
  SystemConfig cfg = icc_config(100, 75);
  cfg.noise_var = snr_to_noise_var(10.0, cfg);
  const TrialDraw t = draw_trial(cfg, 0);
  const IccOutput out = run_single_stream(t.rx, t.channel, cfg);
  const cplx f = evaluate_target(cfg.function, t.frame.s_raw, make_selectors(cfg)[0]).value;
  EXPECT_TRUE(std::isfinite(nmse(out.f_hat, CVector::Constant(1, f), cfg.n_users)));
  ASSERT_EQ(out.combiner_diverged.size(), 1u);
}

TEST(RunSingleStream, PerfectDataAndVanishingNoiseRecoversTheSum) {
  SystemConfig cfg = icc_config(16, 6);
  const TrialDraw base = draw_trial(cfg, 7);
  const double ss = compute_power(cfg);
  const auto sels = make_selectors(cfg);
  const cplx f = evaluate_target(cfg.function, base.frame.s_raw, sels[0]).value;
  double last = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const RxSignal rx{base.channel.h * (base.frame.d + base.frame.s)};
    const CombinerSystem sys = build_normal_system(base.channel, ss, CMatrix::Zero(6, 6), eps, sels);
    const cplx f_hat = apply_combiner(mmse_combiner_direct(sys, 0), rx, base.channel, base.frame.d,
                                      NomographicKind::sum, false);
    const double e = std::norm(f - f_hat) / 6.0;
    EXPECT_LT(e, last);
    last = e;
  }
  EXPECT_LT(last, 1e-12);
}

TEST(RunMultiStream, StreamsSumToTheMergedEstimate) {
  SystemConfig cfg = icc_config(16, 8, 2);
  cfg.solver_mode = SolverMode::direct;
  cfg.noise_var = snr_to_noise_var(10.0, cfg);
  const auto sels = make_selectors(cfg);
  const StreamSelector merged = merged_selector(sels, 8);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const IccOutput split = run_multi_stream(t.rx, t.channel, cfg, sels);
    const IccOutput whole = run_multi_stream(t.rx, t.channel, cfg, {merged});
    ASSERT_EQ(split.f_hat.size(), 2);
    EXPECT_LE(std::abs(split.f_hat.sum() - whole.f_hat(0)), 1e-12 * std::max(1.0, std::abs(whole.f_hat(0))));
  }
}

TEST(RunMultiStream, GroundTruthFollowsTheAssignment) {
  SystemConfig cfg = icc_config(8, 4, 2);
  cfg.stream_assignment = {1, 1, 2, 2};
  const TrialDraw t = draw_trial(cfg, 0);
  const auto sels = make_selectors(cfg);
  EXPECT_EQ(evaluate_target(cfg.function, t.frame.s_raw, sels[0]).value, t.frame.s(0) + t.frame.s(1));
  EXPECT_EQ(evaluate_target(cfg.function, t.frame.s_raw, sels[1]).value, t.frame.s(2) + t.frame.s(3));
}

TEST(RunMultiStream, SelectorLengthIsChecked) {
  SystemConfig cfg = icc_config(8, 4, 2);
  const TrialDraw t = draw_trial(cfg, 0);
  EXPECT_THROW(run_multi_stream(t.rx, t.channel, cfg, {StreamSelector{RVector::Ones(3), 1}}), ConfigError);
}

TEST(RunMfBound, NoiselessDataIsRecoveredExactly) {
  // per-user computing power E_D/K must be small next to the constellation spacing
  SystemConfig cfg = icc_config(64, 48);
  cfg.algorithm = Algorithm::mf_bound;
  cfg.noise_var = 1e-9;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const IccOutput out = run_mf_bound(t.rx, t.channel, cfg, t.frame);
    EXPECT_EQ(count_bit_errors(out.d_hat, t.frame, cfg.roles).errors, 0u);
  }
}

TEST(RunMfBound, DominatesColdStartNmse) {
  SystemConfig cfg = icc_config(16, 8);
  for (double snr : {0.0, 10.0, 20.0, 30.0}) {
    cfg.noise_var = snr_to_noise_var(snr, cfg);
    AggregateMetrics cold, genie;
    for (std::uint64_t trial = 0; trial < 10000; ++trial) {
      cfg.algorithm = Algorithm::single_stream;
      cold.add(run_trial(cfg, trial));
      cfg.algorithm = Algorithm::mf_bound;
      genie.add(run_trial(cfg, trial));
    }
    EXPECT_LE(genie.nmse(), cold.nmse()) << "snr " << snr;
  }
}

TEST(MultiAccess, PinningComputeOnlyUsersDoesNotHurtDataUsers) {
  SystemConfig cfg = icc_config(32, 24);
  set_role_counts(cfg, 8, 8, 8);
  cfg.noise_var = snr_to_noise_var(10.0, cfg);
  const double ss = compute_power(cfg);
  BitCount pinned, free;
  for (std::uint64_t trial = 0; trial < 10000; ++trial) {
    const TrialDraw t = draw_trial(cfg, trial);
    const EffectiveNoiseProfile prof = effective_noise_profile(t.channel, ss, cfg.noise_var);
    const DataStageResult a = run_data_gabp(t.rx, t.channel, prof, cfg, make_access_constraints(cfg));
    const DataStageResult b = run_data_gabp(t.rx, t.channel, prof, cfg, no_constraints(cfg.n_users));
    const BitCount ea = count_bit_errors(a.d_hat, t.frame, cfg.roles);
    const BitCount eb = count_bit_errors(b.d_hat, t.frame, cfg.roles);
    pinned.errors += ea.errors;
    pinned.total += ea.total;
    free.errors += eb.errors;
    free.total += eb.total;
  }
  const double pa = ber(pinned.errors, pinned.total);
  const double pb = ber(free.errors, free.total);
  const double sigma = std::sqrt(pa * (1 - pa) / pinned.total + pb * (1 - pb) / free.total);
  EXPECT_LE(pa, pb + 3.0 * sigma) << "pinned " << pa << " unpinned " << pb;
}

TEST(MultiAccess, PinKdsAlsoPinsDualRoleUsers) {
  SystemConfig cfg = icc_config(8, 6);
  set_role_counts(cfg, 2, 2, 2);
  EXPECT_EQ(make_access_constraints(cfg).force_zero_data, (std::vector<bool>{false, false, true, true, false, false}));
  cfg.pin_kds = true;
  EXPECT_EQ(make_access_constraints(cfg).force_zero_data, (std::vector<bool>{false, false, true, true, true, true}));
}

TEST(WeightedConsensus, DiffersFromPlainAverageButDecidesAlike) {
  SystemConfig cfg = icc_config(32, 8);
  cfg.noise_var = snr_to_noise_var(20.0, cfg);
  const TrialDraw t = draw_trial(cfg, 2);
  const IccOutput plain = run_single_stream(t.rx, t.channel, cfg);
  cfg.weighted_consensus = true;
  const IccOutput weighted = run_single_stream(t.rx, t.channel, cfg);
  EXPECT_NE(plain.d_hat, weighted.d_hat);
  for (Eigen::Index k = 0; k < 8; ++k) EXPECT_EQ(qpsk_hard_bits(plain.d_hat(k)), qpsk_hard_bits(weighted.d_hat(k)));
}

}  // namespace
}  // namespace icc
