#include <gtest/gtest.h>

#include <cmath>

#include "blowup/blowup.hpp"

using namespace blowup;

namespace {

CertificateParams params(int b, double delta, Amplitude A, double w_l1 = 1.0) {
  CertificateParams p;
  p.b = b;
  p.delta = delta;
  p.A = A;
  p.w_l1 = w_l1;
  p.n = b == 2 ? 3 : (b == 3 ? 2 : 1);
  return p;
}

// int_a^t e^{-(t-s) lam - beta s} ds
double duhamel_weight(double a, double t, double lam, double beta) {
  const double z = (lam - beta) * (t - a);
  const double phi = z == 0.0 ? 1.0 : -std::expm1(-z) / z;
  return std::exp(-beta * t) * phi * (t - a);
}

}  // namespace

TEST(CDelta, FrozenValuesAndMonotone) {
  EXPECT_NEAR(c_delta(1.0, 2), 0.776869839851570171, 1e-16);
  EXPECT_NEAR(c_delta(1.0, 4), 0.999446915629852166, 1e-16);
  double prev = 0.0;
  for (double d = 1e-6; d < 100; d *= 3) {
    const double c = c_delta(d, 3);
    if (prev < 1.0) {
      EXPECT_GT(c, prev);
    }
    EXPECT_LE(c, 1.0);
    prev = c;
  }
  EXPECT_LT(c_delta(1e-12, 2), 1e-11);
  EXPECT_THROW(c_delta(0.0, 2), PreconditionError);
}

TEST(Sequence, InitialRowsAndExactValues) {
  const auto seq = build_sequence(params(2, 1.0, Amplitude::absolute(1.0)), 5);
  EXPECT_EQ(seq.rows[0].t, 0.0);
  EXPECT_EQ(seq.rows[0].log_alpha, 0.0);
  EXPECT_NEAR(seq.rows[1].t, 0.375, 1e-16);
  EXPECT_NEAR(seq.rows[2].t, 15.0 / 32.0, 1e-16);
  EXPECT_NEAR(std::exp(seq.rows[1].log_alpha), 0.194217459962892543, 1e-16);
}

TEST(Sequence, ClosedFormsAgree) {
  for (int b : {2, 3, 4, 5}) {
    const double delta = 1.0;
    const auto seq = build_sequence(params(b, delta, Amplitude::multiple(1.0)), 200);
    for (const auto& r : seq.rows) {
      if (r.k == 0) continue;
      const double la = log_alpha_closed_form(r.k, delta, b);
      EXPECT_LE(std::abs(r.log_alpha - la), 1e-10 * std::abs(la)) << b << " " << r.k;
      const double t = t_closed_form(r.k, delta, b);
      EXPECT_LE(std::abs(r.t - t), 1e-12 * t) << b << " " << r.k;
      EXPECT_LE(r.t, 0.5 * delta);
      EXPECT_GT(r.tail, 0.0);  // strictness lives in the tail once t_k rounds to delta/2
      EXPECT_DOUBLE_EQ(r.tail, 0.5 * delta / std::pow(b * b, r.k));
      EXPECT_LE(std::abs((0.5 * delta - r.t) - r.tail), 1e-12 * 0.5 * delta);
    }
    for (std::size_t i = 1; i < seq.rows.size(); ++i) EXPECT_GE(seq.rows[i].t, seq.rows[i - 1].t);
  }
}

TEST(Sequence, LambdaMatchesDefinitionForSmallK) {
  auto p = params(3, 0.7, Amplitude::absolute(50.0), 0.8);
  const auto seq = build_sequence(p, 8);
  for (const auto& r : seq.rows) {
    const double bk = std::pow(3.0, r.k);
    const double direct = bk * (std::log(50.0) + std::log(0.8) - 0.35) + r.log_alpha;
    EXPECT_NEAR(r.Lambda, direct, 1e-11 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Threshold, FrozenValueAndHomogeneity) {
  EXPECT_NEAR(lemma2_threshold(1.0, 2, 1.0), 33.9561905714375035, 1e-12);
  EXPECT_NEAR(lemma2_threshold(1.0, 4, 2.0), 0.5 * lemma2_threshold(1.0, 4, 1.0), 1e-14);
}

TEST(Verdict, Dichotomy) {
  const double w = 0.15;
  const auto up = build_sequence(params(4, 1.0, Amplitude::multiple(2.0), w), 60);
  EXPECT_EQ(up.verdict, Verdict::Diverges);
  ASSERT_TRUE(up.k_star.has_value());
  EXPECT_LE(*up.k_star, 10);
  const auto down = build_sequence(params(4, 1.0, Amplitude::multiple(0.9), w), 60);
  EXPECT_EQ(down.verdict, Verdict::ConvergesToZero);
  EXPECT_LT(down.rows.back().Lambda, -500);
  const auto at = build_sequence(params(4, 1.0, Amplitude::multiple(1.0), w), 60);
  EXPECT_EQ(at.verdict, Verdict::Diverges);
  EXPECT_TRUE(at.at_threshold);
  for (int k = 20; k <= 40; ++k)
    EXPECT_NEAR(at.rows[k].Lambda - at.rows[k - 1].Lambda, 2.0 / 3.0 * std::log(4.0), 1e-6);
}

TEST(Verdict, MonotoneInAmplitude) {
  const double w = 0.3;
  const double amin = lemma2_threshold(0.5, 3, w);
  bool seen_diverge = false;
  for (double f = 0.5; f <= 2.0; f += 0.05) {
    const auto seq = build_sequence(params(3, 0.5, Amplitude::absolute(f * amin), w), 100);
    if (seen_diverge) {
      EXPECT_EQ(seq.verdict, Verdict::Diverges) << f;
    }
    seen_diverge = seen_diverge || seq.verdict == Verdict::Diverges;
    if (f < 0.99) {
      EXPECT_EQ(seq.verdict, Verdict::ConvergesToZero) << f;
    }
  }
  EXPECT_TRUE(seen_diverge);
}

TEST(Verdict, AbsoluteAmplitudeAtThresholdIsMarginal) {
  const double w = 0.3;
  const auto p = params(3, 0.5, Amplitude::absolute(lemma2_threshold(0.5, 3, w)), w);
  const auto seq = build_sequence(p, 50);
  EXPECT_TRUE(seq.verdict == Verdict::Marginal || seq.at_threshold);
}

TEST(Amplitude, Parse) {
  EXPECT_EQ(Amplitude::parse("2x").kind, Amplitude::Kind::ThresholdMultiple);
  EXPECT_DOUBLE_EQ(Amplitude::parse("2x").value, 2.0);
  EXPECT_EQ(Amplitude::parse("37.5").kind, Amplitude::Kind::Absolute);
  EXPECT_THROW(Amplitude::parse("2y"), PreconditionError);
  EXPECT_THROW(Amplitude::parse(""), PreconditionError);
}

TEST(LowerBoundField, BaseCaseIndicatorAndSupport) {
  TorusGrid g({7}, {1024});
  const auto w = build_bump(g, BumpSpec::for_exponent(4));
  const auto lb0 = lower_bound_field(0, 0.3, 5.0, w.spectrum, 4, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(lb0[i].real(), 5.0 * std::exp(-0.3) * w.spectrum[i].real(), 1e-15);
  const auto zero = lower_bound_field(1, 0.1, 5.0, w.spectrum, 4, 1.0);  // t_1 = 15/32
  EXPECT_EQ(l1_spectrum(zero), 0.0);
  const auto lb2 = lower_bound_field(2, 0.5, 5.0, w.spectrum, 4, 1.0);
  EXPECT_GT(l1_spectrum(lb2), 0.0);
  EXPECT_LE(lb2.measured_radius(), 16 * 0.125 + 1e-12);
  EXPECT_TRUE(has_nonnegative_spectrum(lb2, 1e-10));
  EXPECT_THROW(lower_bound_field(3, 0.5, 5.0, w.spectrum, 4, 1.0), PreconditionError);
}

TEST(LowerBoundField, DuhamelStepDominatesNextBound) {
  // One Fourier-Duhamel step applied to bound k-1 (heat factor kept exactly)
  // must dominate bound k at t = t_k.
  const int b = 2;
  const double delta = 1.0, A = 40.0;
  TorusGrid g({6}, {1024});
  const auto w = build_bump(g, BumpSpec::for_exponent(b));
  for (int k = 1; k <= 3; ++k) {
    const double tk = t_closed_form(k, delta, b);
    const double tkm1 = t_closed_form(k - 1, delta, b);
    const auto prev = lower_bound_field(k - 1, tkm1, A, w.spectrum, b, delta);
    // prev = A^{b^{k-1}} alpha_{k-1} e^{-b^{k-1} t_{k-1}} w_{k-1}; undo the time factor.
    const double bkm1 = std::pow(b, k - 1), bk = std::pow(b, k);
    SpectralField base = prev;
    base *= std::exp(bkm1 * tkm1);
    const auto power = convolution_power(base, b);
    const auto next = lower_bound_field(k, tk, A, w.spectrum, b, delta);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double duhamel =
          power[i].real() * duhamel_weight(tkm1, tk, g.frequency_norm_squared(i), bk);
      EXPECT_GE(duhamel - next[i].real(), -1e-9 * std::max(1.0, next.max_abs())) << k << " " << i;
    }
  }
}

TEST(GrowthConstants, EvenOddDefaults) {
  const auto e = default_growth_constants(4);
  EXPECT_DOUBLE_EQ(e.prefactor, 1.0 / (16.0 * 16.0));
  EXPECT_DOUBLE_EQ(e.rate, 15.0);
  const auto o = default_growth_constants(5);  // m = 1
  EXPECT_DOUBLE_EQ(o.prefactor, 1.0 / (32.0 * 32.0));
  EXPECT_DOUBLE_EQ(o.rate, 31.0);
}

TEST(GrowthConstants, OptimalDelta) {
  const auto g = default_growth_constants(4);
  const double d = optimal_delta(g);
  EXPECT_NEAR(d, 0.369678496298637498, 1e-9);
  EXPECT_NEAR(d, 2.0 * std::log(g.rate + 1.0) / g.rate, 1e-9);
}

TEST(Series, EulerMaclaurinMatchesDirectSum) {
  for (int b : {4, 5}) {
    const GrowthSeries series(b);
    const long K = 3000000;
    long double direct = 0.0L;
    for (long k = 0; k < K; ++k) direct += series.term(k);
    const long double N = series.even() ? K - 1 : K;
    EXPECT_NEAR(series.partial(N), static_cast<double>(direct), 1e-13 * static_cast<double>(direct)) << b;
    EXPECT_NEAR(series.log_partial_at_log(std::log(static_cast<double>(N))),
                std::log(static_cast<double>(direct)), 1e-6)
        << b;
  }
}

TEST(GrowthConstant, ConstantEpsilonIncreasing) {
  for (int b : {4, 5}) {
    const auto s = Schedule::constant(b, 1.0);
    const GrowthSeries series(b);
    const auto g = default_growth_constants(b);
    double prev = -std::numeric_limits<double>::infinity();
    for (long N = 1; N <= 100000; ++N) {
      const double v = log_theorem_constant(N, 1.0, s, series, g);
      ASSERT_GT(v, prev) << b << " " << N;
      prev = v;
    }
  }
}

TEST(GrowthConstant, EvenBranchClosedForm) {
  const auto s = Schedule::constant(4, 1.0);
  double sum = 0.0;
  for (int k = 0; k <= 10; ++k) sum += 1.0 / (1.0 + k);
  const double expect = sum / 256.0 * (1.0 - std::exp(-7.5)) * std::exp(-0.5);
  EXPECT_NEAR(theorem_constant(10, 1.0, s), expect, 1e-14 * expect);
}

TEST(GrowthConstant, LogLogScheduleRatioIsFinite) {
  const auto s = Schedule::loglog(4);
  const GrowthSeries series(4);
  const auto g = default_growth_constants(4);
  const double r = log_theorem_constant(1000000, 1.0, s, series, g) -
                   log_theorem_constant(1000, 1.0, s, series, g);
  EXPECT_TRUE(std::isfinite(r));
}

TEST(Threshold, FiniteNIsSelfConsistent) {
  const auto s = Schedule::constant(4, 1.0);
  const auto r = certified_blowup_N(1.0, s, 5.0);
  ASSERT_TRUE(r.found);
  const GrowthSeries series(4);
  const auto g = default_growth_constants(4);
  EXPECT_GE(log_theorem_constant(r.N, 1.0, s, series, g), r.log_rhs);
  EXPECT_LT(log_theorem_constant(r.N - 1, 1.0, s, series, g), r.log_rhs);
  const auto r2 = certified_blowup_N(1.0, s, 10.0);
  ASSERT_TRUE(r2.found);
  EXPECT_LE(r2.N, r.N);
  EXPECT_NEAR(r2.log_rhs - r.log_rhs, -4.0 * std::log(2.0), 1e-12);
}

TEST(Threshold, BisectionBeyondScanRange) {
  // w_l1 chosen so the crossing lies between 2^20 and the cap.
  const auto s = Schedule::constant(4, 1.0);
  const GrowthSeries series(4);
  const auto g = default_growth_constants(4);
  const double target = log_theorem_constant(5000000, 1.0, s, series, g);
  const double w = std::exp((log_threshold_core(1.0, 4) - target) / 4.0) * (1.0 + 1e-9);
  const auto r = certified_blowup_N(1.0, s, w);
  ASSERT_TRUE(r.found);
  EXPECT_GE(log_theorem_constant(r.N, 1.0, s, series, g), r.log_rhs);
  EXPECT_LT(log_theorem_constant(r.N - 1, 1.0, s, series, g), r.log_rhs);
  EXPECT_GT(r.N, 4900000);
}

TEST(Threshold, LogLogScheduleNotFoundWithEstimate) {
  const auto r = certified_blowup_N(1.0, Schedule::loglog(4), 0.15);
  EXPECT_FALSE(r.found);
  EXPECT_GT(r.log10_N_estimate, 9.0);
}

TEST(BesovBoundSeries, QTwoBBoundedQBIncreasingWithConstantEps) {
  const auto twob = besov_bound_series(100000, 8.0, Schedule::loglog(4));
  const double zeta2 = std::pow(std::numbers::pi, 2) / 6.0;
  const double bound = std::pow(zeta2, 1.0 / 8.0) * Schedule::loglog(4).eps(0);
  for (double v : twob) EXPECT_LE(v, bound);
  const auto qb = besov_bound_series(1000, 4.0, Schedule::constant(4, 1.0));
  for (std::size_t i = 1; i < qb.size(); ++i) EXPECT_GT(qb[i], qb[i - 1]);
}
