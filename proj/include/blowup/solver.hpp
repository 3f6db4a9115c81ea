#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blowup/certificate.hpp"
#include "blowup/field.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

/// Admissible window n(b-1)/2 < p < n b (b-1)/2 for the weighted L^p diagnostics.
inline void check_z_window(int n, int b, double p) {
  const double lo = 0.5 * n * (b - 1);
  const double hi = 0.5 * n * b * (b - 1);
  detail::require(p > lo && p < hi, "z-norm exponent p = " + std::to_string(p) +
                                        " outside the open window (" + std::to_string(lo) +
                                        ", " + std::to_string(hi) + ")");
}

/// sigma = 2/(b-1) - n/p
inline double z_sigma(int n, int b, double p) { return 2.0 / (b - 1) - n / p; }

struct SolverConfig {
  int b = 4;
  double dt_max = 1e-3;
  double dt_min = 1e-14;
  double dt_safety = 0.1;    // C in dt = min(dt_max, C / (1 + sup^{b-1}))
  double blowup_cap = 1e8;
  double dealias_pad = 0.0;  // 0 selects (b+1)/2
  double t_end = 1.0;
  int record_every = 1;
  bool nonlinear = true;
  double z_exponent = 0.0;   // 0 selects the middle of the admissible window
  std::vector<double> snapshot_times;

  double pad_factor() const { return dealias_pad > 0.0 ? dealias_pad : 0.5 * (b + 1); }
  double z_p(int n) const { return z_exponent > 0.0 ? z_exponent : 0.25 * n * (b - 1) * (b + 1); }

  void validate(int n) const {
    require_supercritical(n, b);
    detail::require(dt_max > 0.0 && dt_min > 0.0 && dt_min < dt_max,
                    "solver: need 0 < dt_min < dt_max");
    detail::require(dt_safety > 0.0, "solver: dt safety factor must be positive");
    detail::require(blowup_cap > 0.0, "solver: blowup cap must be positive");
    detail::require(pad_factor() >= 0.5 * (b + 1),
                    "solver: dealias pad " + std::to_string(pad_factor()) +
                        " below (b+1)/2 = " + std::to_string(0.5 * (b + 1)) +
                        "; degree-b products would alias");
    detail::require(t_end > 0.0, "solver: t_end must be positive");
    detail::require(record_every >= 1, "solver: record_every must be >= 1");
    check_z_window(n, b, z_p(n));
    for (double t : snapshot_times)
      detail::require(t >= 0.0 && t <= t_end, "solver: snapshot time outside [0, t_end]");
  }
};

/// Dealiased u^b: coefficients are zero-padded to at least pad*M per axis,
/// the power is taken pointwise on the fine grid, and the result is
/// truncated back, dropping the Nyquist mode.
class Nonlinearity {
 public:
  Nonlinearity(const TorusGrid& grid, int b, double pad) : grid_(grid), b_(b) {
    std::vector<std::size_t> fine;
    for (int a = 0; a < grid.dim(); ++a)
      fine.push_back(fft_friendly_size(
          static_cast<std::size_t>(std::ceil(pad * static_cast<double>(grid.modes(a))))));
    fine_dims_ = fine;
    const TorusGrid fine_grid(grid.period_exponents(), fine);
    map_.resize(grid.size());
    keep_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto m = grid.wavenumbers(i);
      bool nyq = false;
      for (int a = 0; a < grid.dim(); ++a)
        nyq = nyq || m[a] == -static_cast<long>(grid.modes(a) / 2);
      keep_[i] = !nyq;
      map_[i] = *fine_grid.flat_of(m);
    }
    fine_size_ = fine_grid.size();
  }

  const std::vector<std::size_t>& fine_dims() const { return fine_dims_; }

  /// Coefficients of u^b projected onto the grid; `sup` receives max |u| on the fine grid.
  std::vector<cplx> operator()(std::span<const cplx> c, double* sup = nullptr) const {
    std::vector<cplx> fine(fine_size_);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (keep_[i]) fine[map_[i]] = c[i];
    auto phys = fft_backward(fine, fine_dims_);
    double m = 0.0;
    for (auto& v : phys) {
      const double x = v.real();
      m = std::max(m, std::abs(x));
      double y = x;
      for (int k = 1; k < b_; ++k) y *= x;
      v = y;
    }
    if (sup) *sup = m;
    const auto back = fft_forward(phys, fine_dims_);
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (keep_[i]) out[i] = back[map_[i]];
    return out;
  }

 private:
  TorusGrid grid_;
  int b_;
  std::vector<std::size_t> fine_dims_;
  std::vector<std::size_t> map_;
  std::vector<bool> keep_;
  std::size_t fine_size_ = 0;
};

struct TrajectoryRecord {
  double t = 0.0;
  double dt = 0.0;
  double l1_spectrum = 0.0;
  double sup_norm = 0.0;
  double lp_crit = 0.0;            // ||u||_{n(b-1)/2}
  double positivity_margin = 0.0;  // min Re c
  double max_coeff = 0.0;          // max |c|
  double z_norm_p = 0.0;           // t^{sigma/2} ||u||_p
};

struct BlowupInfo {
  double T_star = 0.0;
  std::string reason;  // "cap" or "dt_floor"
  double last_t = 0.0;
};

struct Trajectory {
  int n = 1;
  int b = 4;
  double z_exponent = 0.0;
  std::vector<TrajectoryRecord> records;
  std::optional<BlowupInfo> blowup;
  std::vector<std::pair<double, SpectralField>> snapshots;
  std::optional<SpectralField> final_state;
  long steps = 0;

  /// Snapshot taken at time t, if the run reached it.
  const SpectralField* snapshot(double t) const {
    for (const auto& [ts, f] : snapshots)
      if (ts == t) return &f;
    return nullptr;
  }
};

namespace detail {

inline TrajectoryRecord make_record(const SpectralField& u, double t, double dt, int n, int b,
                                    double zp) {
  const auto phys = transform_inverse(u);
  TrajectoryRecord r;
  r.t = t;
  r.dt = dt;
  r.l1_spectrum = l1_spectrum(u);
  r.sup_norm = lp_norm(phys, std::numeric_limits<double>::infinity());
  r.lp_crit = lp_norm(phys, 0.5 * n * (b - 1));
  r.positivity_margin = positivity_margin(u);
  r.max_coeff = u.max_abs();
  r.z_norm_p = t > 0.0 ? std::pow(t, 0.5 * z_sigma(n, b, zp)) * lp_norm(phys, zp) : 0.0;
  return r;
}

inline void check_finite(std::span<const cplx> c, double t) {
  for (const auto& v : c)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalAbort("solver: non-finite coefficient at t = " + std::to_string(t));
}

}  // namespace detail

/// Integrating-factor RK4 (Lawson) for c' = -|xi|^2 c + N(c); the heat
/// multiplier is applied exactly, N is the dealiased u^b.
inline Trajectory simulate(const SpectralField& u0, const SolverConfig& cfg) {
  const auto& grid = u0.grid();
  const int n = grid.dim();
  const int b = cfg.b;
  cfg.validate(n);
  for (int a = 0; a < n; ++a)
    detail::require(u0.support().axis[a] < grid.nyquist(a),
                    "simulate: initial band reaches Nyquist on axis " + std::to_string(a));
  detail::check_finite(u0.coeffs(), 0.0);

  const Nonlinearity nonlin(grid, b, cfg.pad_factor());
  const auto lam = grid.squared_frequencies();
  const std::size_t size = grid.size();
  const double zp = cfg.z_p(n);

  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;

  Trajectory traj;
  traj.n = n;
  traj.b = b;
  traj.z_exponent = zp;

  std::vector<cplx> u(u0.coeffs().begin(), u0.coeffs().end());
  for (std::size_t i = 0; i < size; ++i) {
    const auto m = grid.wavenumbers(i);
    for (int a = 0; a < n; ++a)
      if (m[a] == -static_cast<long>(grid.modes(a) / 2)) u[i] = {};
  }
  const SpectralSupport full = SpectralSupport::ball(n, std::numeric_limits<double>::infinity());
  auto as_field = [&](const std::vector<cplx>& c) {
    return SpectralField(grid, c, full, u0.real_valued(), u0.nonnegative());
  };
  auto eval = [&](std::span<const cplx> c, double* sup) {
    if (!cfg.nonlinear) {
      if (sup) *sup = lp_norm(transform_inverse(as_field({c.begin(), c.end()})),
                              std::numeric_limits<double>::infinity());
      return std::vector<cplx>(c.size());
    }
    return nonlin(c, sup);
  };

  double t = 0.0;
  double last_dt = 0.0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.0)
    traj.snapshots.emplace_back(snaps[next_snap++], as_field(u));
  traj.records.push_back(detail::make_record(as_field(u), t, 0.0, n, b, zp));

  std::vector<double> e_full(size), e_half(size);
  std::vector<cplx> tmp(size), eu_half(size), eu_full(size);
  while (t < cfg.t_end) {
    double sup = 0.0;
    const auto k1 = eval(u, &sup);
    if (!std::isfinite(sup)) throw NumericalAbort("solver: non-finite sup norm at t = " + std::to_string(t));
    if (sup > cfg.blowup_cap) {
      traj.blowup = BlowupInfo{t, "cap", t};
      break;
    }
    const double dt_adapt =
        std::min(cfg.dt_max, cfg.dt_safety / (1.0 + std::pow(sup, b - 1)));
    if (cfg.nonlinear && dt_adapt < cfg.dt_min) {
      traj.blowup = BlowupInfo{t, "dt_floor", t};
      break;
    }
    double h = std::min(dt_adapt, cfg.t_end - t);
    bool hits_snapshot = false;
    if (next_snap < snaps.size() && t + h >= snaps[next_snap]) {
      h = snaps[next_snap] - t;
      hits_snapshot = true;
    }
    const bool hits_end = !hits_snapshot && h == cfg.t_end - t;

    for (std::size_t i = 0; i < size; ++i) {
      e_half[i] = std::exp(-0.5 * h * lam[i]);
      e_full[i] = e_half[i] * e_half[i];
      eu_half[i] = e_half[i] * u[i];
      eu_full[i] = e_full[i] * u[i];
    }
    for (std::size_t i = 0; i < size; ++i) tmp[i] = e_half[i] * (u[i] + 0.5 * h * k1[i]);
    const auto k2 = eval(tmp, nullptr);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = eu_half[i] + 0.5 * h * k2[i];
    const auto k3 = eval(tmp, nullptr);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = eu_full[i] + h * e_half[i] * k3[i];
    const auto k4 = eval(tmp, nullptr);
    for (std::size_t i = 0; i < size; ++i)
      u[i] = eu_full[i] +
             h / 6.0 * (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2[i] + k3[i]) + k4[i]);
    detail::check_finite(u, t + h);

    t = hits_snapshot ? snaps[next_snap] : (hits_end ? cfg.t_end : t + h);
    last_dt = h;
    ++traj.steps;
    if (hits_snapshot) {
      while (next_snap < snaps.size() && snaps[next_snap] <= t)
        traj.snapshots.emplace_back(snaps[next_snap++], as_field(u));
    }
    if (hits_snapshot || hits_end || traj.steps % cfg.record_every == 0)
      traj.records.push_back(detail::make_record(as_field(u), t, h, n, b, zp));
  }
  if (traj.records.back().t != t)
    traj.records.push_back(detail::make_record(as_field(u), t, last_dt, n, b, zp));
  if (traj.blowup) traj.blowup->last_t = traj.records.back().t;
  traj.final_state = as_field(u);
  return traj;
}

// ---------------------------------------------------------------------------

/// Iterates on a uniform mesh t_j = j T / steps. iterates[l-1][j] is u_l(t_j).
struct PicardResult {
  std::vector<double> times;
  std::vector<std::vector<SpectralField>> iterates;
};

namespace detail {

/// (1 - e^{-z}(1+z)) / z^2
inline double phi2(double z) {
  if (z < 0.1) {
    double term = 1.0, sum = 0.0, fact = 2.0;  // (k+2)!
    for (int k = 0; k < 14; ++k) {
      sum += term * (k + 1) / fact;
      term *= -z;
      fact *= (k + 3);
    }
    return sum;
  }
  return (1.0 - std::exp(-z) * (1.0 + z)) / (z * z);
}

inline double phi1(double z) { return z == 0.0 ? 1.0 : -std::expm1(-z) / z; }

}  // namespace detail

/// u_1 = e^{t Delta} u0, u_{l+1}(t) = e^{t Delta} u0 + int_0^t e^{(t-s) Delta} u_l(s)^b ds.
/// The Duhamel integral interpolates u_l^b linearly in s between mesh points
/// and integrates the heat factor exactly, so every weight is nonnegative.
inline PicardResult picard_iterate(const SpectralField& u0, double T, int l_max, int steps,
                                   int b, double pad = 0.0) {
  const auto& grid = u0.grid();
  require_supercritical(grid.dim(), b);
  detail::require(T > 0.0 && l_max >= 1 && steps >= 1,
                  "picard: need T > 0, l_max >= 1, steps >= 1");
  const Nonlinearity nonlin(grid, b, pad > 0.0 ? pad : 0.5 * (b + 1));
  const auto lam = grid.squared_frequencies();
  const std::size_t size = grid.size();
  const double h = T / steps;

  std::vector<double> decay(size), w0(size), w1(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double z = lam[i] * h;
    decay[i] = std::exp(-z);
    const double p1 = detail::phi1(z), p2 = detail::phi2(z);
    w0[i] = h * p2;
    w1[i] = h * (p1 - p2);
  }

  PicardResult res;
  for (int j = 0; j <= steps; ++j) res.times.push_back(j * h);
  const SpectralSupport full =
      SpectralSupport::ball(grid.dim(), std::numeric_limits<double>::infinity());
  auto as_field = [&](std::vector<cplx> c) {
    return SpectralField(grid, std::move(c), full, u0.real_valued(), u0.nonnegative());
  };

  std::vector<std::vector<cplx>> heat(steps + 1, std::vector<cplx>(size));
  for (int j = 0; j <= steps; ++j)
    for (std::size_t i = 0; i < size; ++i) heat[j][i] = std::exp(-res.times[j] * lam[i]) * u0[i];

  std::vector<std::vector<cplx>> cur = heat;
  for (int l = 1; l <= l_max; ++l) {
    std::vector<SpectralField> level;
    for (const auto& c : cur) level.push_back(as_field(c));
    res.iterates.push_back(std::move(level));
    if (l == l_max) break;
    std::vector<std::vector<cplx>> g(steps + 1);
    for (int j = 0; j <= steps; ++j) g[j] = nonlin(cur[j]);
    std::vector<std::vector<cplx>> next(steps + 1, std::vector<cplx>(size));
    std::vector<cplx> integral(size);
    next[0] = heat[0];
    for (int j = 0; j < steps; ++j) {
      for (std::size_t i = 0; i < size; ++i) {
        integral[i] = decay[i] * integral[i] + w0[i] * g[j][i] + w1[i] * g[j + 1][i];
        next[j + 1][i] = heat[j + 1][i] + integral[i];
      }
    }
    cur = std::move(next);
  }
  return res;
}

// ---------------------------------------------------------------------------

enum class CheckStatus { Pass, Fail, Skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIPPED";
  }
  return "?";
}

struct LowerBoundCheck {
  int k = 0;
  double t_k = 0.0;
  double t_probe = 0.0;
  double margin = 0.0;     // min over supp w_k of (u_num - bound)
  double tolerance = 0.0;  // 1e-8 * l1_spectrum(u_num)
  double bound_l1 = 0.0;
  CheckStatus status = CheckStatus::Skipped;
};

struct LowerBoundReport {
  std::vector<LowerBoundCheck> checks;
  /// "PASS", "FAIL", or "PARTIAL" when the solution was gone before some probe.
  std::string overall;
};

struct LowerBoundInputs {
  double A = 0.0;
  int b = 4;
  double delta = 1.0;
  int k_max = 2;
  double probe_offset = 0.01;
};

/// Compares u_num(t_k + offset) with the k-th lower-bound field on the support
/// of w_hat_k. `source` returns nullopt when the solution is unavailable.
inline LowerBoundReport verify_lower_bound(
    const std::function<std::optional<SpectralField>(double)>& source, const SpectralField& w_hat,
    const LowerBoundInputs& in) {
  detail::require(in.k_max >= 0 && in.k_max <= 2, "verify_lower_bound: k_max must be in [0, 2]");
  detail::require(in.probe_offset >= 0.0, "verify_lower_bound: probe offset must be >= 0");
  LowerBoundReport rep;
  bool any_fail = false, any_skip = false;
  for (int k = 0; k <= in.k_max; ++k) {
    LowerBoundCheck c;
    c.k = k;
    c.t_k = k == 0 ? 0.0 : t_closed_form(k, in.delta, in.b);
    c.t_probe = c.t_k + in.probe_offset;
    const auto u = source(c.t_probe);
    if (!u) {
      c.status = CheckStatus::Skipped;
      any_skip = true;
      rep.checks.push_back(c);
      continue;
    }
    const auto lb = lower_bound_field(k, c.t_probe, in.A, w_hat, in.b, in.delta);
    c.bound_l1 = l1_spectrum(lb);
    c.tolerance = 1e-8 * l1_spectrum(*u);
    const auto& grid = u->grid();
    const double radius = std::pow(static_cast<double>(in.b), k) * w_hat.support().radius;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.frequency_norm(i) > radius) continue;
      margin = std::min(margin, (*u)[i].real() - lb[i].real());
    }
    c.margin = margin;
    c.status = margin >= -c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    any_fail = any_fail || c.status == CheckStatus::Fail;
    rep.checks.push_back(c);
  }
  rep.overall = any_fail ? "FAIL" : (any_skip ? "PARTIAL" : "PASS");
  return rep;
}

struct VerifyRun {
  Trajectory trajectory;
  LowerBoundReport report;
};

/// Runs the solver from A * w with snapshots at every probe time and checks
/// the lower bounds against them.
inline VerifyRun verify_with_simulation(const SpectralField& w_hat, const LowerBoundInputs& in,
                                        SolverConfig cfg) {
  SpectralField u0 = w_hat;
  u0 *= in.A;
  cfg.b = in.b;
  for (int k = 0; k <= in.k_max; ++k) {
    const double tp = (k == 0 ? 0.0 : t_closed_form(k, in.delta, in.b)) + in.probe_offset;
    cfg.snapshot_times.push_back(tp);
    cfg.t_end = std::max(cfg.t_end, tp);
  }
  VerifyRun run{simulate(u0, cfg), {}};
  const auto& traj = run.trajectory;
  auto source = [&](double t) -> std::optional<SpectralField> {
    if (const auto* f = traj.snapshot(t)) return *f;
    return std::nullopt;
  };
  run.report = verify_lower_bound(source, w_hat, in);
  return run;
}

struct Theorem1Diagnostics {
  double sup_z = 0.0;
  double z_at_tmin = 0.0;
  double t_min = 0.0;
};

/// sup_t t^{sigma/2} ||u||_p over the records and its value at the earliest t > 0.
inline Theorem1Diagnostics theorem1_diagnostics(const Trajectory& traj, double p) {
  check_z_window(traj.n, traj.b, p);
  detail::require(p == traj.z_exponent, "theorem1_diagnostics: trajectory recorded with p = " +
                                            std::to_string(traj.z_exponent));
  Theorem1Diagnostics d;
  bool first = true;
  for (const auto& r : traj.records) {
    if (r.t <= 0.0) continue;
    if (first) {
      d.z_at_tmin = r.z_norm_p;
      d.t_min = r.t;
      first = false;
    }
    d.sup_z = std::max(d.sup_z, r.z_norm_p);
  }
  return d;
}

}  // namespace blowup
