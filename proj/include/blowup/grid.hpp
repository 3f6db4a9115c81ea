#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

inline constexpr int kMaxDim = 3;

using ModeIndex = std::array<long, kMaxDim>;

/// Periodic box standing in for R^n. Axis i has period 2*pi*2^{r_i} and M_i
/// modes; the frequencies on that axis are m * 2^{-r_i} for
/// m = -M_i/2 ... M_i/2 - 1. Storage is row-major with axis 0 slowest.
/// Axis 0 is the modulation axis (x_1).
class TorusGrid {
 public:
  TorusGrid(std::vector<int> period_exponents, std::vector<std::size_t> modes)
      : r_(std::move(period_exponents)), m_(std::move(modes)) {
    detail::require(!r_.empty() && r_.size() <= kMaxDim,
                    "grid dimension must be 1, 2 or 3");
    detail::require(r_.size() == m_.size(),
                    "grid descriptor: period exponents and mode counts differ in length");
    for (std::size_t a = 0; a < m_.size(); ++a) {
      detail::require(m_[a] >= 2 && m_[a] % 2 == 0,
                      "grid descriptor: modes per axis must be even and >= 2");
      detail::require(std::abs(r_[a]) <= 60, "grid descriptor: period exponent out of range");
    }
    size_ = 1;
    for (auto m : m_) size_ *= m;
  }

  static TorusGrid uniform(int n, int r, std::size_t modes) {
    detail::require(n >= 1 && n <= kMaxDim, "grid dimension must be 1, 2 or 3");
    return TorusGrid(std::vector<int>(n, r), std::vector<std::size_t>(n, modes));
  }

  int dim() const { return static_cast<int>(r_.size()); }
  int period_exponent(int axis) const { return r_[axis]; }
  std::size_t modes(int axis) const { return m_[axis]; }
  const std::vector<int>& period_exponents() const { return r_; }
  const std::vector<std::size_t>& mode_counts() const { return m_; }
  std::size_t size() const { return size_; }

  /// Frequency spacing 2^{-r} on an axis.
  double spacing(int axis) const { return std::ldexp(1.0, -r_[axis]); }
  double period(int axis) const { return 2.0 * std::numbers::pi * std::ldexp(1.0, r_[axis]); }
  double nyquist(int axis) const { return 0.5 * static_cast<double>(m_[axis]) * spacing(axis); }
  double max_nyquist() const {
    double v = 0.0;
    for (int a = 0; a < dim(); ++a) v = std::max(v, nyquist(a));
    return v;
  }
  double min_nyquist() const {
    double v = nyquist(0);
    for (int a = 1; a < dim(); ++a) v = std::min(v, nyquist(a));
    return v;
  }
  /// Volume of one frequency cell, prod 2^{-r_i}.
  double cell_volume() const {
    int total = 0;
    for (int r : r_) total += r;
    return std::ldexp(1.0, -total);
  }
  double dx(int axis) const { return period(axis) / static_cast<double>(m_[axis]); }
  /// Physical quadrature weight per sample, prod dx_i.
  double quadrature_weight() const {
    double w = 1.0;
    for (int a = 0; a < dim(); ++a) w *= dx(a);
    return w;
  }

  /// Signed wavenumber m for storage position i on an axis.
  long wavenumber(int axis, std::size_t i) const {
    const auto half = m_[axis] / 2;
    return i < half ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(m_[axis]);
  }
  double frequency(int axis, std::size_t i) const {
    return std::ldexp(static_cast<double>(wavenumber(axis, i)), -r_[axis]);
  }
  /// Storage position of wavenumber m on an axis, if representable.
  std::optional<std::size_t> position(int axis, long m) const {
    const long half = static_cast<long>(m_[axis] / 2);
    if (m < -half || m >= half) return std::nullopt;
    return static_cast<std::size_t>(m >= 0 ? m : m + static_cast<long>(m_[axis]));
  }

  /// Per-axis positions of a flat index.
  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = flat % m_[a];
      flat /= m_[a];
    }
    return idx;
  }
  std::size_t flatten(const std::array<std::size_t, kMaxDim>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * m_[a] + idx[a];
    return flat;
  }

  ModeIndex wavenumbers(std::size_t flat) const {
    const auto idx = unflatten(flat);
    ModeIndex m{};
    for (int a = 0; a < dim(); ++a) m[a] = wavenumber(a, idx[a]);
    return m;
  }
  std::array<double, kMaxDim> frequency_vector(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, kMaxDim> xi{};
    for (int a = 0; a < dim(); ++a) xi[a] = frequency(a, idx[a]);
    return xi;
  }
  double frequency_norm(std::size_t flat) const { return std::sqrt(frequency_norm_squared(flat)); }
  double frequency_norm_squared(std::size_t flat) const {
    const auto xi = frequency_vector(flat);
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) s += xi[a] * xi[a];
    return s;
  }
  /// |xi|^2 for every storage position.
  std::vector<double> squared_frequencies() const {
    std::vector<double> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = frequency_norm_squared(i);
    return out;
  }
  /// Flat index of -xi (wavenumber negation modulo M on every axis).
  std::size_t mirror(std::size_t flat) const {
    auto idx = unflatten(flat);
    for (int a = 0; a < dim(); ++a) idx[a] = (m_[a] - idx[a]) % m_[a];
    return flatten(idx);
  }
  /// Flat index of a signed wavenumber vector, if representable.
  std::optional<std::size_t> flat_of(const ModeIndex& m) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (int a = 0; a < dim(); ++a) {
      auto p = position(a, m[a]);
      if (!p) return std::nullopt;
      idx[a] = *p;
    }
    return flatten(idx);
  }

  /// Same grid with every period exponent shifted by -j (frequencies scaled by 2^j).
  TorusGrid dilated(int j) const {
    auto r = r_;
    for (auto& v : r) v -= j;
    return TorusGrid(std::move(r), m_);
  }

  std::string describe() const {
    std::string s = "n=" + std::to_string(dim()) + " r=[";
    for (int a = 0; a < dim(); ++a) s += (a ? "," : "") + std::to_string(r_[a]);
    s += "] M=[";
    for (int a = 0; a < dim(); ++a) s += (a ? "," : "") + std::to_string(m_[a]);
    return s + "]";
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
    return a.r_ == b.r_ && a.m_ == b.m_;
  }

 private:
  std::vector<int> r_;
  std::vector<std::size_t> m_;
  std::size_t size_ = 0;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  detail::require(a == b, std::string(what) + ": grids differ (" + a.describe() + " vs " +
                              b.describe() + ")");
}

/// Smallest power of two M with M * 2^{-r} / 2 strictly above `band`.
inline std::size_t modes_for_band(double band, int r) {
  std::size_t m = 2;
  while (0.5 * static_cast<double>(m) * std::ldexp(1.0, -r) <= band) m *= 2;
  return m;
}

}  // namespace blowup
