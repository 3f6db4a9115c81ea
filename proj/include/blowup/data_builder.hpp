#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "blowup/field.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

/// Fujita-supercritical regime n(b-1)/2 > 1, required by every construction.
inline void require_supercritical(int n, int b) {
  detail::require(b >= 2, "b must be an integer >= 2 (got " + std::to_string(b) + ")");
  detail::require(n >= 1 && n <= kMaxDim, "dimension n must be 1, 2 or 3");
  detail::require(n * (b - 1) > 2,
                  "precondition n(b-1)/2 > 1 violated (n=" + std::to_string(n) +
                      ", b=" + std::to_string(b) + "): Fujita regime, blowup occurs for all "
                      "positive data and the construction does not apply");
}

struct BumpSpec {
  double rho = 0.25;        // support radius in frequency units
  double amplitude = 1.0;   // density value at xi = 0

  static BumpSpec for_exponent(int b, double amplitude = 1.0) {
    return {1.0 / (2.0 * b), amplitude};
  }
  void validate() const {
    detail::require(rho > 0.0 && rho <= 0.25, "bump: support radius must lie in (0, 1/4]");
    detail::require(amplitude > 0.0 && std::isfinite(amplitude),
                    "bump: amplitude must be positive");
  }
};

/// Spectral density amplitude * exp(1 - 1/(1 - |xi/rho|^2)) inside the ball, 0 outside.
inline double bump_profile(double radius, const BumpSpec& spec) {
  const double t = radius / spec.rho;
  if (t >= 1.0) return 0.0;
  return spec.amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
}

struct Bump {
  BumpSpec spec;
  RealField physical;
  SpectralField spectrum;

  double profile(double radius) const { return bump_profile(radius, spec); }
};

/// w with w_hat = bump density; coefficients are density * cell volume so
/// that sum|c| approximates the integral of w_hat.
inline Bump build_bump(const TorusGrid& grid, const BumpSpec& spec) {
  spec.validate();
  for (int a = 0; a < grid.dim(); ++a) {
    detail::require(2.0 * spec.rho / grid.spacing(a) >= 6.0,
                    "bump: under-resolved, fewer than 6 coefficients across the diameter on "
                    "axis " + std::to_string(a));
    detail::require(spec.rho < grid.nyquist(a), "bump: support exceeds Nyquist");
  }
  const double cell = grid.cell_volume();
  std::vector<cplx> coeffs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    coeffs[i] = bump_profile(grid.frequency_norm(i), spec) * cell;
  SpectralField spectrum(grid, std::move(coeffs), SpectralSupport::ball(grid.dim(), spec.rho),
                         true, true);
  auto physical = transform_inverse(spectrum);
  return {spec, std::move(physical), std::move(spectrum)};
}

enum class EpsilonMode { LogLog, Constant };

/// eta_k and epsilon_N rules.
struct Schedule {
  int b = 2;
  EpsilonMode mode = EpsilonMode::LogLog;
  double constant_eps = 1.0;

  static Schedule loglog(int b) { return {b, EpsilonMode::LogLog, 1.0}; }
  static Schedule constant(int b, double eps) { return {b, EpsilonMode::Constant, eps}; }

  void validate() const {
    detail::require(b >= 2, "schedule: b must be >= 2");
    detail::require(mode == EpsilonMode::LogLog || constant_eps > 0.0,
                    "schedule: constant epsilon must be positive");
  }
  /// eta_k = (1+k)^{-1/b}
  double eta(long double k) const { return static_cast<double>(std::pow(1.0L + k, -1.0L / b)); }
  /// epsilon_N = 1/log(log(3+N)) or the constant override.
  double eps(long double N) const {
    if (mode == EpsilonMode::Constant) return constant_eps;
    return static_cast<double>(1.0L / std::log(std::log(3.0L + N)));
  }
  /// log epsilon_N, valid for any N >= 0.
  double log_eps(long double N) const {
    if (mode == EpsilonMode::Constant) return std::log(constant_eps);
    return static_cast<double>(-std::log(std::log(std::log(3.0L + N))));
  }
  const char* mode_name() const { return mode == EpsilonMode::LogLog ? "loglog" : "constant"; }
};

inline std::pair<double, double> schedule_values(const Schedule& s, long k, long N) {
  detail::require(k >= 0 && N >= 0, "schedule: indices must be >= 0");
  return {s.eta(k), s.eps(N)};
}

/// Modulation frequency (3/2) 2^k.
inline double modulation_frequency(int k) { return std::ldexp(1.5, k); }

/// Spectrum of cos((3/2) 2^k x_1) w(x): (1/2)[w_hat(xi + s e_1) + w_hat(xi - s e_1)],
/// built by exact index shifts on axis 0.
inline SpectralField modulated_bump(const SpectralField& w, int k) {
  const auto& grid = w.grid();
  detail::require(k >= 0, "modulation index must be >= 0");
  detail::require(grid.period_exponent(0) >= 1,
                  "modulation (3/2)2^k needs period exponent r >= 1 on axis 0");
  const double shift = modulation_frequency(k);
  detail::require(shift + w.support().axis[0] < grid.nyquist(0),
                  "modulation (3/2)2^" + std::to_string(k) + " plus bump radius reaches Nyquist " +
                      std::to_string(grid.nyquist(0)) + " on axis 0");
  const long dm = static_cast<long>(std::ldexp(3.0, k - 1 + grid.period_exponent(0)));
  std::vector<cplx> coeffs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (w[i] == cplx{}) continue;
    ModeIndex m = grid.wavenumbers(i);
    for (long sign : {-1L, 1L}) {
      ModeIndex shifted = m;
      shifted[0] += sign * dm;
      auto flat = grid.flat_of(shifted);
      detail::require(flat.has_value(), "modulated bump: shifted mode off grid");
      coeffs[*flat] += 0.5 * w[i];
    }
  }
  SpectralSupport support = w.support();
  support.axis[0] += shift;
  support.radius += shift;
  return SpectralField(grid, std::move(coeffs), std::move(support), w.real_valued(),
                       w.nonnegative());
}

/// k-th term eps_N 2^{2k/b} eta_k cos((3/2)2^k x_1) w(x) of the initial data.
inline SpectralField data_term(const SpectralField& w, int k, int N, const Schedule& s) {
  auto term = modulated_bump(w, k);
  term *= s.eps(N) * std::pow(2.0, 2.0 * k / s.b) * s.eta(k);
  return term;
}

struct InitialData {
  RealField physical;
  SpectralField spectrum;
};

/// u_{0,N}(x) = eps_N sum_{k=0}^N 2^{2k/b} eta_k cos((3/2)2^k x_1) w(x).
inline InitialData build_u0N(const TorusGrid& grid, int N, const Schedule& s,
                             const SpectralField& w) {
  s.validate();
  require_supercritical(grid.dim(), s.b);
  require_same_grid(grid, w.grid(), "build_u0N");
  detail::require(N >= 0, "build_u0N: N must be >= 0");
  detail::require(modulation_frequency(N) + w.support().axis[0] < grid.nyquist(0),
                  "build_u0N: (3/2)2^N + rho = " +
                      std::to_string(modulation_frequency(N) + w.support().axis[0]) +
                      " reaches Nyquist " + std::to_string(grid.nyquist(0)) + " on axis 0");
  SpectralField total = data_term(w, 0, N, s);
  for (int k = 1; k <= N; ++k) total += data_term(w, k, N, s);
  total.set_tags(true, true);
  auto physical = transform_inverse(total);
  return {std::move(physical), std::move(total)};
}

/// Default grid for data at level N: period exponent r on axis 0, transverse
/// axes at r_transverse, mode counts chosen as powers of two that resolve the
/// modulated band and, when `bank_levels` is set, the filter bank up to N.
inline TorusGrid data_grid(int n, int b, int N, int r = 8, int r_transverse = 5,
                           bool bank_levels = true) {
  const double rho = 1.0 / (2.0 * b);
  double band0 = modulation_frequency(N) + rho;
  if (bank_levels) band0 = std::max(band0, std::ldexp(8.0 / 3.0, std::max(N, 1)));
  std::vector<int> rs{r};
  std::vector<std::size_t> ms{modes_for_band(band0, r)};
  for (int a = 1; a < n; ++a) {
    rs.push_back(r_transverse);
    ms.push_back(modes_for_band(2.0 * rho, r_transverse));
  }
  return TorusGrid(std::move(rs), std::move(ms));
}

}  // namespace blowup
