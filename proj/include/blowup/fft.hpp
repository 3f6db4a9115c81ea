#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

using cplx = std::complex<double>;

namespace detail {

// Out-of-place complex plans created with FFTW_UNALIGNED so they can run on
// any std::vector buffer; results do not depend on buffer alignment.
class FftPlan {
 public:
  FftPlan(const std::vector<int>& dims, int sign) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    fftw_complex* in = fftw_alloc_complex(total);
    fftw_complex* out = fftw_alloc_complex(total);
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), in, out, sign,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan_ == nullptr) throw Error("fftw: plan creation failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() { fftw_destroy_plan(plan_); }

  void execute(const cplx* in, cplx* out) const {
    // fftw_execute_dft is thread-safe; the input is not modified by an out-of-place c2c plan.
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  fftw_plan plan_ = nullptr;
};

inline const FftPlan& plan_for(const std::vector<int>& dims, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<int>, int>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(dims, sign);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(dims, sign)).first;
  return *it->second;
}

inline std::vector<int> as_int_dims(const std::vector<std::size_t>& dims) {
  return {dims.begin(), dims.end()};
}

}  // namespace detail

/// c = (1/N) sum_x f(x) e^{-i x.xi}
inline std::vector<cplx> fft_forward(std::span<const cplx> samples,
                                     const std::vector<std::size_t>& dims) {
  std::vector<cplx> out(samples.size());
  detail::plan_for(detail::as_int_dims(dims), FFTW_FORWARD).execute(samples.data(), out.data());
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// f(x) = sum_xi c_xi e^{i x.xi}
inline std::vector<cplx> fft_backward(std::span<const cplx> coeffs,
                                      const std::vector<std::size_t>& dims) {
  std::vector<cplx> out(coeffs.size());
  detail::plan_for(detail::as_int_dims(dims), FFTW_BACKWARD).execute(coeffs.data(), out.data());
  return out;
}

/// Smallest even size >= n whose only prime factors are 2, 3 and 5.
inline std::size_t fft_friendly_size(std::size_t n) {
  if (n < 2) n = 2;
  for (std::size_t m = n + (n % 2);; m += 2) {
    std::size_t v = m;
    for (std::size_t p : {2u, 3u, 5u})
      while (v % p == 0) v /= p;
    if (v == 1) return m;
  }
}

}  // namespace blowup
