#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "blowup/data_builder.hpp"
#include "blowup/field.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

// All certificate scalars are natural logarithms. Powers b^k multiply
// log-quantities; A^{b^k} and alpha_k themselves overflow by k ~ 10.

/// c_delta = 1 - e^{-(delta/2)(b^2-1)}
inline double c_delta(double delta, int b) {
  detail::require(delta > 0.0, "c_delta: delta must be positive");
  detail::require(b >= 2, "c_delta: b must be >= 2");
  return -std::expm1(-0.5 * delta * (b * b - 1.0));
}

inline double log_c_delta(double delta, int b) {
  return std::log(c_delta(delta, b));
}

/// log of b^{2b/(b-1)^2} c_delta^{-1/(b-1)} e^{delta/2}, the w-independent
/// part of the amplitude threshold.
inline double log_threshold_core(double delta, int b) {
  const double bm1 = b - 1.0;
  return 2.0 * b / (bm1 * bm1) * std::log(static_cast<double>(b)) -
         log_c_delta(delta, b) / bm1 + 0.5 * delta;
}

/// A_min = b^{2b/(b-1)^2} c_delta^{-1/(b-1)} e^{delta/2} / ||w_hat||_1.
/// Any A >= A_min forces blowup before delta/2 for data u0 >= A w.
inline double lemma2_threshold(double delta, int b, double w_l1) {
  detail::require(w_l1 > 0.0, "threshold: ||w_hat||_1 must be positive");
  return std::exp(log_threshold_core(delta, b) - std::log(w_l1));
}

/// An amplitude given either absolutely or as a multiple of A_min ("2x").
struct Amplitude {
  enum class Kind { Absolute, ThresholdMultiple };
  Kind kind = Kind::Absolute;
  double value = 1.0;

  static Amplitude absolute(double a) { return {Kind::Absolute, a}; }
  static Amplitude multiple(double m) { return {Kind::ThresholdMultiple, m}; }

  /// Parses "37.5" or "2x".
  static Amplitude parse(const std::string& text) {
    detail::require(!text.empty(), "amplitude: empty value");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw PreconditionError("amplitude: cannot parse '" + text + "'");
    }
    if (used == text.size()) return absolute(v);
    detail::require(used + 1 == text.size() && (text.back() == 'x' || text.back() == 'X'),
                    "amplitude: expected a number or a multiple like '2x', got '" + text + "'");
    return multiple(v);
  }

  std::string str() const {
    return kind == Kind::Absolute ? std::to_string(value) : std::to_string(value) + "x";
  }
};

struct CertificateParams {
  int b = 4;
  double delta = 1.0;
  Amplitude A = Amplitude::multiple(1.0);
  double w_l1 = 1.0;
  int n = 1;

  void validate() const {
    require_supercritical(n, b);
    detail::require(delta > 0.0 && std::isfinite(delta), "certificate: delta must be positive");
    detail::require(A.value > 0.0 && std::isfinite(A.value),
                    "certificate: amplitude must be positive");
    detail::require(w_l1 > 0.0 && std::isfinite(w_l1),
                    "certificate: ||w_hat||_1 must be positive");
  }
  double threshold() const { return lemma2_threshold(delta, b, w_l1); }
  double log_threshold() const { return log_threshold_core(delta, b) - std::log(w_l1); }
  /// log(A / A_min); exactly 0 for the multiple 1x.
  double log_ratio() const {
    if (A.kind == Amplitude::Kind::ThresholdMultiple) return std::log(A.value);
    return std::log(A.value) - log_threshold();
  }
  double amplitude() const {
    return A.kind == Amplitude::Kind::Absolute ? A.value : A.value * threshold();
  }
  double log_amplitude() const {
    return A.kind == Amplitude::Kind::Absolute ? std::log(A.value)
                                               : std::log(A.value) + log_threshold();
  }
};

/// t_k = (delta/2)(b^2-1) sum_{j=1}^k b^{-2j} = (delta/2)(1 - b^{-2k})
inline double t_closed_form(int k, double delta, int b) {
  return 0.5 * delta * -std::expm1(-2.0 * k * std::log(static_cast<double>(b)));
}

/// log alpha_k from
/// alpha_k = b^{-2b/(b-1)^2 b^k + 2k/(b-1) + 2b/(b-1)^2} c_delta^{(b^k-1)/(b-1)}.
inline double log_alpha_closed_form(int k, double delta, int b) {
  const double bm1 = b - 1.0;
  const double bk = std::pow(static_cast<double>(b), k);
  const double lb = std::log(static_cast<double>(b));
  return (-2.0 * b / (bm1 * bm1) * bk + 2.0 * k / bm1 + 2.0 * b / (bm1 * bm1)) * lb +
         (bk - 1.0) / bm1 * log_c_delta(delta, b);
}

enum class Verdict { Diverges, ConvergesToZero, Marginal };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Diverges: return "DIVERGES";
    case Verdict::ConvergesToZero: return "CONVERGES_TO_ZERO";
    case Verdict::Marginal: return "MARGINAL";
  }
  return "?";
}

struct CertificateRow {
  int k = 0;
  double t = 0.0;          // t_k by recursion
  double tail = 0.0;       // delta/2 - t_k, carried as (delta/2) b^{-2k}
  double log_alpha = 0.0;  // by recursion
  double Lambda = 0.0;     // log(A^{b^k} alpha_k e^{-b^k delta/2} ||w_hat||_1^{b^k})
};

struct CertificateSequence {
  CertificateParams params;
  std::vector<CertificateRow> rows;
  Verdict verdict = Verdict::Marginal;
  /// Amplitude is exactly A_min: reported as DIVERGES, growth only linear in k.
  bool at_threshold = false;
  std::optional<int> k_star;  // first k with Lambda_k > escape
  double growth_coefficient = 0.0;  // coefficient of b^k in Lambda_k, log(A/A_min)
  double linear_slope = 0.0;        // (2/(b-1)) log b
  double threshold = 0.0;           // A_min
  bool truncated = false;           // rows stopped before k_max (double range)
};

inline constexpr double kEscapeLog = 500.0;

/// Rows k = 0..k_max of the lower-bound recursion. Lambda_k is assembled as
/// b^k log(A/A_min) + (2k/(b-1)) log b + beta, which equals the definition
/// b^k (log A + log||w||_1 - delta/2) + log alpha_k with the b^k terms
/// cancelled symbolically.
inline CertificateSequence build_sequence(const CertificateParams& p, int k_max) {
  p.validate();
  detail::require(k_max >= 1, "build_sequence: k_max must be >= 1");
  const int b = p.b;
  const double bm1 = b - 1.0;
  const double lb = std::log(static_cast<double>(b));
  const double lc = log_c_delta(p.delta, b);
  const double beta = 2.0 * b / (bm1 * bm1) * lb - lc / bm1;

  CertificateSequence seq;
  seq.params = p;
  seq.threshold = p.threshold();
  seq.linear_slope = 2.0 / bm1 * lb;
  const double kappa = p.log_ratio();
  seq.growth_coefficient = kappa;

  const double step_factor = 0.5 * p.delta * (b * b - 1.0);
  double t = 0.0;
  double log_alpha = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      const double b2k = std::exp(-2.0 * k * lb);
      t = std::min(t + b2k * step_factor, 0.5 * p.delta);  // true value is below delta/2
      log_alpha = b * log_alpha - 2.0 * k * lb + lc;
    }
    const double bk = std::pow(static_cast<double>(b), k);
    const double lam = (kappa == 0.0 ? 0.0 : bk * kappa) + k * seq.linear_slope + beta;
    if (!std::isfinite(lam) || !std::isfinite(log_alpha)) {
      seq.truncated = true;
      break;
    }
    const double tail = 0.5 * p.delta * std::pow(static_cast<double>(b), -2.0 * k);
    seq.rows.push_back({k, t, tail, log_alpha, lam});
    if (!seq.k_star && lam > kEscapeLog) seq.k_star = k;
  }

  // Roundoff in log(A) - log(A_min) for absolute amplitudes.
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() *
                     std::max({1.0, std::abs(p.log_amplitude()), std::abs(p.log_threshold())});
  if (kappa == 0.0) {
    seq.verdict = Verdict::Diverges;
    seq.at_threshold = true;
  } else if (p.A.kind == Amplitude::Kind::Absolute && std::abs(kappa) <= tol) {
    seq.verdict = Verdict::Marginal;
  } else {
    seq.verdict = kappa > 0.0 ? Verdict::Diverges : Verdict::ConvergesToZero;
  }
  return seq;
}

struct DivergenceReport {
  CertificateSequence sequence;
  /// Amplitude at which the b^k coefficient of Lambda_k changes sign.
  double critical_amplitude = 0.0;
  std::string guarantee;
};

inline DivergenceReport divergence_report(const CertificateParams& p, int k_max) {
  DivergenceReport r{build_sequence(p, k_max), p.threshold(), {}};
  const auto& s = r.sequence;
  if (s.verdict == Verdict::Diverges)
    r.guarantee = "certified T* <= delta/2 = " + std::to_string(0.5 * p.delta) +
                  " for data u0 >= A w" + (s.at_threshold ? " (amplitude exactly at threshold)" : "");
  else
    r.guarantee = "no certificate: amplitude below the blowup threshold";
  return r;
}

/// A^{b^k} alpha_k e^{-b^k t} 1_{t >= t_k} w_hat_k with w_hat_k the b^k-fold
/// convolution power of w_hat. The scalar is formed in log space.
inline SpectralField lower_bound_field(int k, double t, double A, const SpectralField& w_hat,
                                       int b, double delta) {
  detail::require(k >= 0 && k <= 3, "lower_bound_field: k must lie in [0, 3]");
  detail::require(t >= 0.0, "lower_bound_field: t must be >= 0");
  detail::require(A >= 0.0, "lower_bound_field: A must be >= 0");
  detail::require(b >= 2 && delta > 0.0, "lower_bound_field: need b >= 2 and delta > 0");
  const double bk = std::pow(static_cast<double>(b), k);
  const double support_radius = bk * w_hat.support().radius;
  for (int a = 0; a < w_hat.grid().dim(); ++a)
    detail::require(support_radius < w_hat.grid().nyquist(a),
                    "lower_bound_field: support radius b^k rho = " +
                        std::to_string(support_radius) + " overflows Nyquist on axis " +
                        std::to_string(a));

  double tk = 0.0;
  double log_alpha = 0.0;
  const double lb = std::log(static_cast<double>(b));
  for (int i = 1; i <= k; ++i) {
    tk += std::exp(-2.0 * i * lb) * 0.5 * delta * (b * b - 1.0);
    log_alpha = b * log_alpha - 2.0 * i * lb + log_c_delta(delta, b);
  }

  SpectralField wk = w_hat;
  for (int i = 0; i < k; ++i) wk = convolution_power(wk, b);
  if (t < tk || A == 0.0) {
    SpectralField zero(w_hat.grid());
    zero.set_support(wk.support());
    return zero;
  }
  wk *= std::exp(bk * std::log(A) + log_alpha - bk * t);
  return wk;
}

// ---------------------------------------------------------------------------
// Growth constant c(N, delta) and the certified threshold in N.

/// Constants of the lower bound
/// u_hat_N(t) >= eps_N^b S(N) * prefactor * (1 - e^{-t rate}) e^{-t} (w_hat)^{*b}.
/// Even b: prefactor 2^{-b}/(4b), rate 4b-1. Odd b = 2m+3: prefactor
/// 2^{-b}/(8(m+3)), rate 8(m+3)-1. The odd term also carries a factor 2^{2/b} >= 1
/// which is dropped (conservative).
struct GrowthConstants {
  double prefactor = 0.0;
  double rate = 0.0;
};

inline GrowthConstants default_growth_constants(int b) {
  detail::require(b >= 2, "growth constants: b must be >= 2");
  if (b % 2 == 0) return {std::ldexp(1.0, -b) / (4.0 * b), 4.0 * b - 1.0};
  const int m = (b - 3) / 2;
  return {std::ldexp(1.0, -b) / (8.0 * (m + 3)), 8.0 * (m + 3) - 1.0};
}

/// (1 - e^{-rate t}) e^{-t} at t = delta/2.
inline double time_factor(double delta, const GrowthConstants& g) {
  const double t = 0.5 * delta;
  return -std::expm1(-g.rate * t) * std::exp(-t);
}

/// delta maximizing time_factor. The log-derivative r/(e^{r delta/2} - 1) - 1
/// is strictly decreasing, so bisect on its sign.
inline double optimal_delta(const GrowthConstants& g, double lo = 1e-9, double hi = 50.0) {
  auto slope = [&](double delta) { return g.rate / std::expm1(0.5 * g.rate * delta) - 1.0; };
  detail::require(slope(lo) > 0.0 && slope(hi) < 0.0, "optimal_delta: maximizer not bracketed");
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    (slope(m) > 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

/// Partial sums S(N) of the schedule series driving c(N, delta):
/// even b: sum_{k=0}^N eta_k^b; odd b: sum_{k=0}^{N-1} eta_k^{b-1} eta_{k+1}.
/// Terms are (1+k)^{-a} (2+k)^{-c} with a + c = 1. Sums up to kDirect terms
/// are tabulated; beyond, Euler-Maclaurin with an exact asymptotic integral.
class GrowthSeries {
 public:
  static constexpr std::size_t kDirect = std::size_t{1} << 20;

  explicit GrowthSeries(int b) : b_(b), even_(b % 2 == 0) {
    detail::require(b >= 2, "growth series: b must be >= 2");
    a_ = even_ ? 1.0 : (b - 1.0) / b;
    c_ = even_ ? 0.0 : 1.0 / b;
    prefix_.resize(kDirect + 1);
    long double s = 0.0L;
    prefix_[0] = 0.0L;
    for (std::size_t k = 0; k < kDirect; ++k) {
      s += term(static_cast<long double>(k));
      prefix_[k + 1] = s;
    }
  }

  int b() const { return b_; }
  bool even() const { return even_; }

  /// g(k) = (1+k)^{-a} (2+k)^{-c}
  long double term(long double k) const {
    if (even_) return 1.0L / (1.0L + k);
    return std::pow(1.0L + k, -static_cast<long double>(a_)) *
           std::pow(2.0L + k, -static_cast<long double>(c_));
  }

  /// Number of terms in S(N).
  long double term_count(long double N) const { return even_ ? N + 1.0L : N; }

  /// S(N) for N >= 0 (N >= 1 for odd b).
  double partial(long double N) const {
    const long double K = term_count(N);
    if (K <= kDirect) return static_cast<double>(prefix_[static_cast<std::size_t>(K)]);
    return static_cast<double>(tail_sum(K, std::log(K)));
  }

  /// log S at N = e^{logN}, valid for arbitrarily large N.
  double log_partial_at_log(double logN) const {
    if (logN < std::log(static_cast<double>(kDirect)) - 1.0)
      return std::log(partial(std::floor(std::exp(static_cast<long double>(logN)))));
    const long double logK = logN;  // K and N differ by at most 1 here
    const long double K = logK < 11000.0L ? std::exp(logK) : std::numeric_limits<long double>::infinity();
    return static_cast<double>(std::log(tail_sum(K, logK)));
  }

 private:
  // sum_{k=0}^{K-1} g(k) for K > kDirect.
  long double tail_sum(long double K, long double logK) const {
    const long double K0 = static_cast<long double>(kDirect);
    const long double y0 = 1.0L + K0;
    const long double y1 = K;  // y = 1 + x at x = K - 1
    // integral_{K0}^{K-1} g = log(y1/y0) + sum_i binom(-c, i) (y0^{-i} - y1^{-i}) / i
    long double integral = logK - std::log(y0);
    long double coef = 1.0L;
    for (int i = 1; i <= 6; ++i) {
      coef *= (-static_cast<long double>(c_) - (i - 1)) / i;
      const long double inv1 = std::isinf(y1) ? 0.0L : std::pow(y1, -i);
      integral += coef * (std::pow(y0, -i) - inv1) / i;
    }
    const long double g0 = term(K0);
    const long double g1 = std::isinf(K) ? 0.0L : term(K - 1.0L);
    const long double d0 = derivative(K0);
    const long double d1 = std::isinf(K) ? 0.0L : derivative(K - 1.0L);
    return prefix_[kDirect] + integral + 0.5L * (g0 + g1) + (d1 - d0) / 12.0L;
  }
  long double derivative(long double x) const {
    return term(x) * (-static_cast<long double>(a_) / (1.0L + x) -
                      static_cast<long double>(c_) / (2.0L + x));
  }

  int b_;
  bool even_;
  double a_ = 1.0;
  double c_ = 0.0;
  std::vector<long double> prefix_;
};

/// log c(N, delta) = log(eps_N^b S(N) prefactor time_factor(delta)).
inline double log_theorem_constant(long double N, double delta, const Schedule& s,
                                   const GrowthSeries& series, const GrowthConstants& g) {
  detail::require(N >= 1, "theorem constant: N must be >= 1");
  detail::require(series.b() == s.b, "theorem constant: series built for a different b");
  return s.b * s.log_eps(N) + std::log(series.partial(N)) + std::log(g.prefactor) +
         std::log(time_factor(delta, g));
}

/// c(N, delta) for even b (sum of eta_k^b) or odd b (sum of eta_k^{b-1} eta_{k+1}).
inline double theorem_constant(long N, double delta, const Schedule& s) {
  s.validate();
  detail::require(delta > 0.0, "theorem constant: delta must be positive");
  GrowthSeries series(s.b);
  return std::exp(log_theorem_constant(N, delta, s, series, default_growth_constants(s.b)));
}

/// Right-hand side of the N threshold, b^{2b/(b-1)^2} e^{delta/2} / (c_delta^{1/(b-1)} ||w_hat||_1^b), in log.
inline double log_threshold_rhs(double delta, int b, double w_l1) {
  detail::require(w_l1 > 0.0, "threshold: ||w_hat||_1 must be positive");
  return log_threshold_core(delta, b) - b * std::log(w_l1);
}

struct ThresholdResult {
  bool found = false;
  long N = 0;
  long cap = 0;
  double log_c = 0.0;     // log c(N, delta) at the returned N
  double log_rhs = 0.0;
  double log10_N_estimate = 0.0;  // extrapolation when not found (may be +inf)
  std::string guarantee;
};

/// Smallest N >= N_start with c(N, delta) >= rhs. c(N) is unimodal in N
/// (it can first decrease when eps_N falls quickly), so the search scans the
/// tabulated range and then bisects on the increasing branch up to `cap`.
inline ThresholdResult certified_blowup_N(double delta, const Schedule& s, double w_l1,
                                          long cap = 1000000000L, long N_start = 1) {
  s.validate();
  detail::require(delta > 0.0, "threshold: delta must be positive");
  detail::require(cap >= N_start && N_start >= 1, "threshold: need 1 <= N_start <= cap");
  const int b = s.b;
  const GrowthSeries series(b);
  const GrowthConstants g = default_growth_constants(b);
  ThresholdResult r;
  r.cap = cap;
  r.log_rhs = log_threshold_rhs(delta, b, w_l1);
  auto logc = [&](long double N) { return log_theorem_constant(N, delta, s, series, g); };
  auto finish = [&](long N) {
    r.found = true;
    r.N = N;
    r.log_c = logc(N);
    r.guarantee = "certified T*_N < delta = " + std::to_string(delta) + " for N = " +
                  std::to_string(N);
    return r;
  };

  const long scan_end = std::min<long>(cap, static_cast<long>(GrowthSeries::kDirect) - 1);
  for (long N = N_start; N <= scan_end; ++N)
    if (logc(N) >= r.log_rhs) return finish(N);

  if (cap > scan_end && logc(cap) >= r.log_rhs) {
    long lo = scan_end, hi = cap;  // logc(lo) < rhs <= logc(hi)
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (logc(mid) >= r.log_rhs ? hi : lo) = mid;
    }
    return finish(hi);
  }

  // Extrapolate in L = log N using the asymptotic series and eps_N.
  auto f = [&](double L) {
    double log_eps;
    if (s.mode == EpsilonMode::Constant) {
      log_eps = std::log(s.constant_eps);
    } else {
      const long double logN3 = L < 40.0 ? std::log(3.0L + std::exp(static_cast<long double>(L)))
                                         : static_cast<long double>(L);
      log_eps = static_cast<double>(-std::log(std::log(logN3)));
    }
    return b * log_eps + series.log_partial_at_log(L) + std::log(g.prefactor) +
           std::log(time_factor(delta, g));
  };
  double lo = std::log(static_cast<double>(cap));
  double hi = lo;
  while (f(hi) < r.log_rhs) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) {
      r.log10_N_estimate = std::numeric_limits<double>::infinity();
      r.guarantee = "NOT_FOUND: no N up to the cap; c(N) stays below the threshold";
      return r;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= r.log_rhs ? hi : lo) = mid;
  }
  r.log10_N_estimate = hi / std::log(10.0);
  r.guarantee = "NOT_FOUND up to N = " + std::to_string(cap) + "; extrapolated N ~ 10^" +
                std::to_string(r.log10_N_estimate);
  return r;
}

/// eps_N (sum_{j=0}^N eta_j^q)^{1/q} for every N in [0, N_max]; the gridless
/// form of the Besov-norm upper bound of u_{0,N} (without the ||w||_p factor).
inline std::vector<double> besov_bound_series(long N_max, double q, const Schedule& s) {
  s.validate();
  detail::require(N_max >= 0 && q >= 1.0, "besov bound series: need N_max >= 0 and q >= 1");
  std::vector<double> out(static_cast<std::size_t>(N_max + 1));
  long double sum = 0.0L;
  for (long N = 0; N <= N_max; ++N) {
    if (std::isinf(q)) {
      out[N] = s.eps(N);  // sup_j eta_j = eta_0 = 1
      continue;
    }
    sum += std::pow(1.0L + N, -static_cast<long double>(q) / s.b);
    out[N] = s.eps(N) * static_cast<double>(std::pow(sum, 1.0L / static_cast<long double>(q)));
  }
  return out;
}

}  // namespace blowup
