#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "blowup/fft.hpp"
#include "blowup/grid.hpp"

namespace blowup {

/// Real samples at the uniform physical points of a grid.
class RealField {
 public:
  explicit RealField(TorusGrid grid) : grid_(std::move(grid)), samples_(grid_.size(), 0.0) {}
  RealField(TorusGrid grid, std::vector<double> samples)
      : grid_(std::move(grid)), samples_(std::move(samples)) {
    detail::require(samples_.size() == grid_.size(),
                    "real field: sample count does not match grid " + grid_.describe());
    for (double v : samples_)
      detail::require(std::isfinite(v), "real field: non-finite sample");
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

 private:
  TorusGrid grid_;
  std::vector<double> samples_;
};

/// Declared spectral support: a box (per-axis half widths) intersected with a
/// Euclidean ball. Coefficients outside it are zero.
struct SpectralSupport {
  std::vector<double> axis;  // per-axis |xi_i| bound
  double radius = 0.0;       // Euclidean |xi| bound

  static SpectralSupport ball(int n, double radius) {
    return {std::vector<double>(n, radius), radius};
  }
  bool contains(const std::array<double, kMaxDim>& xi, int n) const {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      if (std::abs(xi[a]) > axis[a]) return false;
      s += xi[a] * xi[a];
    }
    return std::sqrt(s) <= radius;
  }
  friend SpectralSupport operator+(const SpectralSupport& a, const SpectralSupport& b) {
    SpectralSupport s{a.axis, a.radius + b.radius};
    for (std::size_t i = 0; i < s.axis.size(); ++i) s.axis[i] += b.axis[i];
    return s;
  }
};

/// Fourier coefficients c_xi of f(x) = sum_xi c_xi e^{i x.xi}, in FFT storage
/// order on the grid. Tags record realness and nonnegativity of the spectrum.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid)
      : grid_(std::move(grid)),
        coeffs_(grid_.size(), cplx{}),
        support_(SpectralSupport::ball(grid_.dim(), 0.0)) {}

  SpectralField(TorusGrid grid, std::vector<cplx> coeffs, SpectralSupport support,
                bool real_valued, bool nonnegative)
      : grid_(std::move(grid)),
        coeffs_(std::move(coeffs)),
        support_(std::move(support)),
        real_valued_(real_valued),
        nonnegative_(nonnegative) {
    detail::require(coeffs_.size() == grid_.size(),
                    "spectral field: coefficient count does not match grid " + grid_.describe());
    detail::require(static_cast<int>(support_.axis.size()) == grid_.dim(),
                    "spectral field: support descriptor has wrong dimension");
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }

  const SpectralSupport& support() const { return support_; }
  void set_support(SpectralSupport s) { support_ = std::move(s); }
  bool real_valued() const { return real_valued_; }
  bool nonnegative() const { return nonnegative_; }
  void set_tags(bool real_valued, bool nonnegative) {
    real_valued_ = real_valued;
    nonnegative_ = nonnegative;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Zero every coefficient outside the declared support.
  void truncate_to_support() {
    const int n = grid_.dim();
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (!support_.contains(grid_.frequency_vector(i), n)) coeffs_[i] = {};
  }

  /// Largest |xi| carrying a coefficient above rel_tol * max|c|.
  double measured_radius(double rel_tol = 0.0) const {
    const double floor = rel_tol * max_abs();
    double r = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (std::abs(coeffs_[i]) > floor) r = std::max(r, grid_.frequency_norm(i));
    return r;
  }

  SpectralField& operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    if (s < 0) nonnegative_ = false;
    return *this;
  }
  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "spectral field sum");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    for (std::size_t a = 0; a < support_.axis.size(); ++a)
      support_.axis[a] = std::max(support_.axis[a], o.support_.axis[a]);
    support_.radius = std::max(support_.radius, o.support_.radius);
    real_valued_ = real_valued_ && o.real_valued_;
    nonnegative_ = nonnegative_ && o.nonnegative_;
    return *this;
  }

 private:
  TorusGrid grid_;
  std::vector<cplx> coeffs_;
  SpectralSupport support_;
  bool real_valued_ = true;
  bool nonnegative_ = true;
};

/// max_xi |c_xi - conj(c_{-xi})| / max|c|; zero for exactly Hermitian data.
inline double hermitian_defect(const SpectralField& f) {
  const double scale = f.max_abs();
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    d = std::max(d, std::abs(f[i] - std::conj(f[f.grid().mirror(i)])));
  return d / scale;
}

/// min_xi Re c_xi.
inline double positivity_margin(const SpectralField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : f.coeffs()) m = std::min(m, c.real());
  return m;
}

/// True when Re c >= -tol*max|c| and |Im c| <= tol*max|c| everywhere.
inline bool has_nonnegative_spectrum(const SpectralField& f, double tol = 1e-12) {
  const double floor = tol * f.max_abs();
  for (const auto& c : f.coeffs())
    if (c.real() < -floor || std::abs(c.imag()) > floor) return false;
  return true;
}

}  // namespace blowup
