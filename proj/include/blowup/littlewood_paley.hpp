#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/field.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

/// C-infinity step: 0 for u <= 0, 1 for u >= 1,
/// e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}) in between.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

/// Radial cutoff chi: 1 on [0, inner], 0 on [outer, inf), smooth in between.
struct RadialCutoff {
  double inner = 1.0;
  double outer = 1.25;

  double operator()(double rho) const {
    if (rho <= inner) return 1.0;
    if (rho >= outer) return 0.0;
    return 1.0 - smooth_step((rho - inner) / (outer - inner));
  }
};

/// Annulus profile psi_hat(xi) = chi(|xi|/2) - chi(|xi|). With the default
/// cutoff it vanishes outside 1 <= |xi| <= 5/2 and equals 1 on [5/4, 2].
inline double annulus_profile(double r, const RadialCutoff& chi = {}) {
  return chi(0.5 * r) - chi(r);
}

/// Annulus profiles psi_hat(2^{-j} xi) for j_min <= j <= j_max sampled on a grid.
class FilterBank {
 public:
  static constexpr double kSupportInner = 0.75;   // 3/4
  static constexpr double kSupportOuter = 8.0 / 3.0;
  static constexpr double kPlateauInner = 1.25;   // 5/4
  static constexpr double kPlateauOuter = 1.75;   // 7/4

  FilterBank(TorusGrid grid, int j_min, int j_max, RadialCutoff chi = {})
      : grid_(std::move(grid)), j_min_(j_min), j_max_(j_max), chi_(chi) {
    detail::require(j_max - j_min >= 1, "filter bank: need j_max - j_min >= 1");
    detail::require(std::ldexp(kSupportOuter, j_max) < grid_.max_nyquist(),
                    "filter bank: band overflow, 2^j_max * 8/3 = " +
                        std::to_string(std::ldexp(kSupportOuter, j_max)) +
                        " not below Nyquist " + std::to_string(grid_.max_nyquist()));
    const auto n = grid_.size();
    std::vector<double> radius(n);
    for (std::size_t i = 0; i < n; ++i) radius[i] = grid_.frequency_norm(i);
    profiles_.reserve(static_cast<std::size_t>(j_max - j_min + 1));
    for (int j = j_min; j <= j_max; ++j) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = annulus_profile(std::ldexp(radius[i], -j), chi_);
      profiles_.push_back(std::move(p));
    }
  }

  const TorusGrid& grid() const { return grid_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }
  const RadialCutoff& cutoff() const { return chi_; }

  std::span<const double> profile(int j) const {
    detail::require(contains(j), "filter bank: block index " + std::to_string(j) +
                                     " outside [" + std::to_string(j_min_) + ", " +
                                     std::to_string(j_max_) + "]");
    return profiles_[static_cast<std::size_t>(j - j_min_)];
  }

  /// sum_j psi_hat(2^{-j} xi) at a storage position.
  double partition_sum(std::size_t flat) const {
    double s = 0.0;
    for (const auto& p : profiles_) s += p[flat];
    return s;
  }

 private:
  TorusGrid grid_;
  int j_min_;
  int j_max_;
  RadialCutoff chi_;
  std::vector<std::vector<double>> profiles_;
};

inline FilterBank build_filter_bank(const TorusGrid& grid, int j_min, int j_max) {
  return FilterBank(grid, j_min, j_max);
}

/// Delta_j F: c_xi -> psi_hat(2^{-j} xi) c_xi.
inline SpectralField dyadic_block(const SpectralField& F, const FilterBank& bank, int j) {
  require_same_grid(F.grid(), bank.grid(), "dyadic_block");
  const auto profile = bank.profile(j);
  SpectralField out = F;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= profile[i];
  auto support = out.support();
  const double outer = std::ldexp(2.5, j);
  for (auto& v : support.axis) v = std::min(v, outer);
  support.radius = std::min(support.radius, outer);
  out.set_support(std::move(support));
  return out;
}

struct BesovBlock {
  int j = 0;
  double block_norm = 0.0;  // ||Delta_j f||_p
  double weighted = 0.0;    // 2^{js} ||Delta_j f||_p
};

struct BesovReport {
  double s = 0.0;
  double p = 0.0;
  double q = 0.0;
  int j_min = 0;
  int j_max = 0;
  std::vector<BesovBlock> blocks;
  double total = 0.0;
};

/// (sum_i x_i^q)^{1/q}, or max for q = infinity, scaled against overflow.
inline double lq_sum(const std::vector<double>& values, double q) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  if (m == 0.0 || std::isinf(q)) return m;
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v) / m, q);
  return m * std::pow(s, 1.0 / q);
}

/// Throws when F carries more than rel_tol of its l1 mass where the bank's
/// profiles do not sum to one.
inline void check_bank_coverage(const SpectralField& F, const FilterBank& bank,
                                double rel_tol = 1e-12) {
  const double total = l1_spectrum(F);
  if (total == 0.0) return;
  double residual = 0.0;
  std::vector<std::size_t> offenders;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double miss = std::abs(F[i]) * std::abs(1.0 - bank.partition_sum(i));
    if (miss > 0.0) {
      residual += miss;
      if (miss > rel_tol * total * 1e-3 && offenders.size() < 8) offenders.push_back(i);
    }
  }
  if (residual <= rel_tol * total) return;
  std::ostringstream msg;
  msg << "besov_norm: spectral mass outside blocks [" << bank.j_min() << ", " << bank.j_max()
      << "]: " << residual / total << " of the total; offending modes:";
  for (auto i : offenders) {
    const auto xi = F.grid().frequency_vector(i);
    msg << " (";
    for (int a = 0; a < F.grid().dim(); ++a) msg << (a ? "," : "") << xi[a];
    msg << ")|c|=" << std::abs(F[i]);
  }
  throw PreconditionError(msg.str());
}

/// Homogeneous Besov norm (sum_j (2^{js} ||Delta_j f||_p)^q)^{1/q} over the
/// bank's range, after checking that no spectral mass lies outside it.
inline BesovReport besov_report(const SpectralField& F, double s, double p, double q,
                                const FilterBank& bank) {
  detail::require(p >= 1.0 && q >= 1.0, "besov_norm: p and q must be >= 1");
  check_bank_coverage(F, bank);
  BesovReport rep{s, p, q, bank.j_min(), bank.j_max(), {}, 0.0};
  std::vector<double> weighted;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const double norm = lp_norm(transform_inverse(dyadic_block(F, bank, j)), p);
    const double w = std::pow(2.0, j * s) * norm;
    rep.blocks.push_back({j, norm, w});
    weighted.push_back(w);
  }
  rep.total = lq_sum(weighted, q);
  return rep;
}

inline BesovReport besov_report(const RealField& f, double s, double p, double q,
                                const FilterBank& bank) {
  return besov_report(transform_forward(f), s, p, q, bank);
}

inline double besov_norm(const RealField& f, double s, double p, double q,
                         const FilterBank& bank) {
  return besov_report(f, s, p, q, bank).total;
}

inline double besov_norm(const SpectralField& F, double s, double p, double q,
                         const FilterBank& bank) {
  return besov_report(F, s, p, q, bank).total;
}

/// Critical indices of the scale-invariant space: s = -2/b, p = n b (b-1) / 2.
struct CriticalIndices {
  double s;
  double p;
};

inline CriticalIndices critical_besov_indices(int n, int b) {
  return {-2.0 / b, 0.5 * n * b * (b - 1)};
}

}  // namespace blowup
