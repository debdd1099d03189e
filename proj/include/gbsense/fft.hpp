#pragma once

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "gbsense/types.hpp"

namespace gbsense::fft {

namespace detail {

// FFTW's planner is not thread-safe, execution of a finished plan is.
// Plans are created once per (size, direction) with FFTW_UNALIGNED so the
// same plan can be replayed on arbitrary caller buffers.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline std::vector<cplx> transform(std::span<const cplx> x, int sign) {
  if (x.empty()) return {};
  std::vector<cplx> out(x.size());
  fftw_plan plan = PlanCache::instance().get(x.size(), sign);
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(x.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace detail

/// Unnormalized DFT with kernel e^{-j 2 pi k m / n}.
inline std::vector<cplx> forward(std::span<const cplx> x) {
  return detail::transform(x, FFTW_FORWARD);
}

/// Inverse DFT normalized by 1/n, so inverse(forward(x)) == x.
inline std::vector<cplx> inverse(std::span<const cplx> x) {
  auto out = detail::transform(x, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace gbsense::fft
