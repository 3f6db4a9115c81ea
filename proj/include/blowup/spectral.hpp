#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "blowup/fft.hpp"
#include "blowup/field.hpp"
#include "blowup/grid.hpp"

namespace blowup {

namespace detail {

// Pairwise summation; fixed tree shape, so results are reproducible.
template <typename T, typename F>
double pairwise_sum(std::span<const T> v, F&& term) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (const auto& x : v) s += term(x);
    return s;
  }
  const auto half = v.size() / 2;
  return pairwise_sum(v.first(half), term) + pairwise_sum(v.subspan(half), term);
}

inline constexpr double kNoiseFloor = 1e-13;

}  // namespace detail

/// Per-axis and Euclidean extent of the coefficients above rel_tol * max|c|.
inline SpectralSupport measured_support(const TorusGrid& grid, std::span<const cplx> coeffs,
                                        double rel_tol) {
  double scale = 0.0;
  for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
  SpectralSupport s = SpectralSupport::ball(grid.dim(), 0.0);
  const double floor = rel_tol * scale;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (std::abs(coeffs[i]) <= floor) continue;
    const auto xi = grid.frequency_vector(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      s.axis[a] = std::max(s.axis[a], std::abs(xi[a]));
      r2 += xi[a] * xi[a];
    }
    s.radius = std::max(s.radius, std::sqrt(r2));
  }
  return s;
}

/// Coefficients of f(x) = sum c_xi e^{i x.xi}. The declared support is the
/// extent of coefficients above the transform noise floor; sub-floor
/// coefficients outside it are set to zero.
inline SpectralField transform_forward(const RealField& f) {
  const auto& grid = f.grid();
  std::vector<cplx> samples(f.samples().begin(), f.samples().end());
  auto coeffs = fft_forward(samples, grid.mode_counts());
  auto support = measured_support(grid, coeffs, detail::kNoiseFloor);
  SpectralField out(grid, std::move(coeffs), std::move(support), true, false);
  out.truncate_to_support();
  return out;
}

/// Physical samples sum_xi c_xi e^{i x.xi}; the imaginary part is dropped.
inline RealField transform_inverse(const SpectralField& F) {
  auto values = fft_backward(F.coeffs(), F.grid().mode_counts());
  std::vector<double> samples(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) samples[i] = values[i].real();
  return RealField(F.grid(), std::move(samples));
}

/// Complex physical samples (no realness assumed).
inline std::vector<cplx> physical_values(const SpectralField& F) {
  return fft_backward(F.coeffs(), F.grid().mode_counts());
}

/// Plain discrete convolution out_xi = sum_eta a_eta b_{xi-eta}. Rejected
/// when the summed supports reach the Nyquist frequency on any axis, since
/// the circular product would then wrap around.
inline SpectralField convolve(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "convolve");
  const auto& grid = a.grid();
  const SpectralSupport support = a.support() + b.support();
  for (int ax = 0; ax < grid.dim(); ++ax) {
    detail::require(support.axis[ax] < grid.nyquist(ax),
                    "convolve: aliasing risk, summed band " + std::to_string(support.axis[ax]) +
                        " on axis " + std::to_string(ax) + " reaches Nyquist " +
                        std::to_string(grid.nyquist(ax)));
  }
  auto pa = physical_values(a);
  const auto pb = physical_values(b);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  auto coeffs = fft_forward(pa, grid.mode_counts());
  SpectralField out(grid, std::move(coeffs), support, a.real_valued() && b.real_valued(),
                    a.nonnegative() && b.nonnegative());
  out.truncate_to_support();
  return out;
}

/// b-fold convolution power f^{*b}.
inline SpectralField convolution_power(const SpectralField& f, int b) {
  detail::require(b >= 1, "convolution power: exponent must be >= 1");
  SpectralField out = f;
  for (int i = 1; i < b; ++i) out = convolve(out, f);
  return out;
}

/// c_xi -> e^{-t|xi|^2} c_xi.
inline SpectralField heat_multiply(SpectralField F, double t) {
  detail::require(t >= 0.0, "heat_multiply: time must be >= 0");
  if (t == 0.0) return F;
  const auto& grid = F.grid();
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= std::exp(-t * grid.frequency_norm_squared(i));
  return F;
}

/// (sum_i |f(x_i)|^p dx^n)^{1/p}; p = infinity gives max |f|.
inline double lp_norm(const RealField& f, double p) {
  detail::require(p >= 1.0, "lp_norm: exponent must be >= 1");
  const auto s = f.samples();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : s) m = std::max(m, std::abs(v));
    return m;
  }
  double scale = 0.0;
  for (double v : s) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  const double sum =
      detail::pairwise_sum(s, [&](double v) { return std::pow(std::abs(v) / scale, p); });
  return scale * std::pow(sum * f.grid().quadrature_weight(), 1.0 / p);
}

/// sum_xi |c_xi|, which bounds sup|f| from above.
inline double l1_spectrum(const SpectralField& F) {
  return detail::pairwise_sum(F.coeffs(), [](const cplx& c) { return std::abs(c); });
}

/// Amplitude factor 2^{2j/(b-1)} of the scaling u -> lambda^{2/(b-1)} u(lambda x).
inline double dyadic_amplitude(int j, int b) {
  detail::require(b >= 2, "dyadic_rescale: b must be >= 2");
  return std::pow(2.0, 2.0 * j / (b - 1));
}

/// 2^{2j/(b-1)} F evaluated at 2^j x: same coefficient array on the grid
/// whose frequencies are 2^j times larger (period L / 2^j).
inline SpectralField dyadic_rescale(const SpectralField& F, int j, int b) {
  const double amp = dyadic_amplitude(j, b);
  auto support = F.support();
  const double lambda = std::ldexp(1.0, j);
  for (auto& v : support.axis) v *= lambda;
  support.radius *= lambda;
  std::vector<cplx> coeffs(F.coeffs().begin(), F.coeffs().end());
  for (auto& c : coeffs) c *= amp;
  return SpectralField(F.grid().dilated(j), std::move(coeffs), std::move(support),
                       F.real_valued(), F.nonnegative());
}

/// Same rescaling, reindexed onto an explicit target grid. Rejected when the
/// rescaled band does not fit below the target Nyquist frequency or when a
/// rescaled frequency is not a target grid point.
inline SpectralField dyadic_rescale(const SpectralField& F, int j, int b,
                                    const TorusGrid& target) {
  const auto& src = F.grid();
  detail::require(src.dim() == target.dim(), "dyadic_rescale: dimension mismatch");
  const SpectralField scaled = dyadic_rescale(F, j, b);
  const auto& mid = scaled.grid();
  for (int a = 0; a < src.dim(); ++a) {
    detail::require(scaled.support().axis[a] < target.nyquist(a),
                    "dyadic_rescale: band overflow, rescaled band " +
                        std::to_string(scaled.support().axis[a]) + " on axis " +
                        std::to_string(a) + " reaches target Nyquist " +
                        std::to_string(target.nyquist(a)));
    detail::require(target.period_exponent(a) >= mid.period_exponent(a),
                    "dyadic_rescale: rescaled frequencies do not lie on the target grid");
  }
  SpectralField out(target, std::vector<cplx>(target.size()), scaled.support(),
                    scaled.real_valued(), scaled.nonnegative());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (scaled[i] == cplx{}) continue;
    ModeIndex m = mid.wavenumbers(i);
    for (int a = 0; a < src.dim(); ++a)
      m[a] <<= (target.period_exponent(a) - mid.period_exponent(a));
    auto flat = target.flat_of(m);
    detail::require(flat.has_value(), "dyadic_rescale: band overflow on target grid");
    out[*flat] = scaled[i];
  }
  return out;
}

/// Physical-space form: output(x) = 2^{2j/(b-1)} f(2^j x) on the dilated grid.
inline RealField dyadic_rescale(const RealField& f, int j, int b) {
  const double amp = dyadic_amplitude(j, b);
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for (auto& v : s) v *= amp;
  return RealField(f.grid().dilated(j), std::move(s));
}

}  // namespace blowup
