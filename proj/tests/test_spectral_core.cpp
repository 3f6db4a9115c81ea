#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "blowup/blowup.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

RealField smooth_samples(const TorusGrid& g) {
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    double v = 0.3;
    for (int a = 0; a < g.dim(); ++a) {
      const double x = idx[a] * g.dx(a);
      v += std::cos(3.0 * x * g.spacing(a)) + 0.25 * std::sin(5.0 * x * g.spacing(a) + 0.1 * a);
    }
    s[i] = v;
  }
  return RealField(g, s);
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Grid, FrequenciesAndMirror) {
  TorusGrid g({3}, {16});
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.125);
  EXPECT_DOUBLE_EQ(g.nyquist(0), 1.0);
  EXPECT_EQ(g.wavenumber(0, 9), -7);
  EXPECT_EQ(g.mirror(3), 13u);
  EXPECT_EQ(g.mirror(8), 8u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.125);
  EXPECT_THROW(TorusGrid({1}, {7}), PreconditionError);
  EXPECT_THROW(TorusGrid({1, 1, 1, 1}, {4, 4, 4, 4}), PreconditionError);
}

TEST(Transform, ForwardMatchesDirectDft1d) {
  TorusGrid g({2}, {32});
  const auto f = smooth_samples(g);
  const auto F = transform_forward(f);
  const auto ref = oracle::direct_dft(g, {f.samples().begin(), f.samples().end()});
  EXPECT_LE(max_diff(F.coeffs(), ref), 1e-13);
}

TEST(Transform, ForwardMatchesDirectDft2d) {
  TorusGrid g({1, 0}, {8, 6});
  const auto f = smooth_samples(g);
  const auto F = transform_forward(f);
  const auto ref = oracle::direct_dft(g, {f.samples().begin(), f.samples().end()});
  EXPECT_LE(max_diff(F.coeffs(), ref), 1e-13);
}

TEST(Transform, RoundTripAndHermitian) {
  TorusGrid g({1, 2}, {16, 8});
  const auto f = smooth_samples(g);
  const auto F = transform_forward(f);
  EXPECT_LE(hermitian_defect(F), 1e-14);
  const auto back = transform_inverse(F);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-13);
}

TEST(Convolve, MatchesDirectSummation1d) {
  TorusGrid g({2}, {64});
  std::vector<cplx> a(g.size()), b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.frequency(0, i);
    if (std::abs(xi) <= 3.0) a[i] = {std::exp(-xi * xi), 0.1 * xi};
    if (std::abs(xi) <= 2.0) b[i] = {1.0 / (1.0 + xi * xi), 0.0};
  }
  SpectralField A(g, a, SpectralSupport::ball(1, 3.0), false, false);
  SpectralField B(g, b, SpectralSupport::ball(1, 2.0), true, true);
  const auto C = convolve(A, B);
  const auto ref = oracle::direct_convolution(g, a, b);
  EXPECT_LE(max_diff(C.coeffs(), ref), 1e-12);
}

TEST(Convolve, MatchesDirectSummation2d) {
  TorusGrid g({1, 1}, {8, 8});
  std::vector<cplx> a(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.frequency_norm(i) <= 0.9) a[i] = 1.0 + g.frequency_norm_squared(i);
  SpectralField A(g, a, SpectralSupport::ball(2, 0.9), true, true);
  const auto C = convolution_power(A, 2);
  const auto ref = oracle::direct_convolution(g, a, a);
  EXPECT_LE(max_diff(C.coeffs(), ref), 1e-12);
}

TEST(Convolve, RejectsAliasingRisk) {
  TorusGrid g({0}, {16});
  SpectralField A(g, std::vector<cplx>(16, 1.0), SpectralSupport::ball(1, 5.0), true, true);
  try {
    convolve(A, A);
    FAIL() << "expected rejection";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("aliasing risk"), std::string::npos);
  }
}

TEST(HeatMultiply, ExactMultiplier) {
  TorusGrid g({0}, {8});
  std::vector<cplx> c(8, 1.0);
  SpectralField F(g, c, SpectralSupport::ball(1, 4.0), true, true);
  const auto H = heat_multiply(F, 1.0);
  EXPECT_NEAR(H[*g.position(0, 2)].real(), 0.0183156388887341803, 1e-17);
  EXPECT_DOUBLE_EQ(H[0].real(), 1.0);
  EXPECT_THROW(heat_multiply(F, -1e-3), PreconditionError);
}

TEST(LpNorm, ConstantFunctionAndRejections) {
  TorusGrid g({1}, {32});
  RealField f(g, std::vector<double>(32, 2.0));
  const double L = 4.0 * std::numbers::pi;
  EXPECT_NEAR(lp_norm(f, 3.0), 2.0 * std::cbrt(L), 1e-13);
  EXPECT_DOUBLE_EQ(lp_norm(f, std::numeric_limits<double>::infinity()), 2.0);
  EXPECT_THROW(lp_norm(f, 0.5), PreconditionError);
}

TEST(L1Spectrum, BoundsSupNorm) {
  TorusGrid g({1, 2}, {16, 8});
  const auto f = smooth_samples(g);
  const auto F = transform_forward(f);
  EXPECT_GE(l1_spectrum(F) * (1 + 1e-14), lp_norm(f, std::numeric_limits<double>::infinity()));
}

TEST(Bump, L1SpectrumStableUnderRefinement) {
  // Coefficients are density * cell volume, so sum |c| is a Riemann sum of
  // the density and converges as r grows.
  const auto spec = BumpSpec::for_exponent(4);
  const auto w8 = build_bump(TorusGrid({8}, {128}), spec);
  const auto w9 = build_bump(TorusGrid({9}, {256}), spec);
  const double a = l1_spectrum(w8.spectrum), b = l1_spectrum(w9.spectrum);
  EXPECT_LE(std::abs(a - b) / b, 1e-6);
  const double p = 6.0;
  TorusGrid g8({8}, {512}), g9({9}, {1024});
  const double n8 = lp_norm(build_bump(g8, spec).physical, p);
  const double n9 = lp_norm(build_bump(g9, spec).physical, p);
  EXPECT_LE(std::abs(n8 - n9) / n9, 1e-6);
}

TEST(DyadicRescale, PhysicalSamplesScaleExactly) {
  TorusGrid g({6}, {512});
  const auto w = build_bump(g, BumpSpec::for_exponent(4));
  const auto scaled = dyadic_rescale(w.spectrum, 1, 4);
  EXPECT_EQ(scaled.grid().period_exponent(0), 5);
  const auto phys = transform_inverse(scaled);
  const double amp = std::pow(2.0, 2.0 / 3.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(phys[i], amp * w.physical[i], 1e-14);
}

TEST(DyadicRescale, TargetGridReindexAndOverflow) {
  TorusGrid g({6}, {512});
  const auto w = build_bump(g, BumpSpec::for_exponent(4));
  const auto out = dyadic_rescale(w.spectrum, 1, 4, TorusGrid({6}, {512}));
  EXPECT_NEAR(l1_spectrum(out), std::pow(2.0, 2.0 / 3.0) * l1_spectrum(w.spectrum), 1e-14);
  EXPECT_NEAR(out.support().radius, 0.25, 1e-15);
  EXPECT_THROW(dyadic_rescale(w.spectrum, 4, 4, TorusGrid({6}, {32})), PreconditionError);
}
