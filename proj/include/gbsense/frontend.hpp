#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbsense/fft.hpp"
#include "gbsense/sampler.hpp"
#include "gbsense/types.hpp"

namespace gbsense {

// Phase-corrected lane spectra X (P x N'), N' = N/d. Column n of row p is
// T e^{-j 2 pi c_p n / (L N')} times bin n of the N'-point DFT of the
// folded lane, which equals bin n*d of the full N-point lane DFT.
struct MeasurementMatrix {
  Eigen::MatrixXcd entries;  // P x N'
  SamplingPattern pattern;
  int window_len = 0;  // N before folding
  int decimation = 1;  // d
};

/// Folds a lane into d equal segments and sums them: y[m] = sum_k x[m + k*(N/d)].
inline std::vector<cplx> decimate_fold(std::span<const cplx> lane, int d) {
  const auto n = lane.size();
  if (d < 1 || n == 0 || n % static_cast<std::size_t>(d) != 0)
    fail(errc::indivisible_window, "decimation " + std::to_string(d) +
                                       " does not divide window of " + std::to_string(n));
  const std::size_t out_len = n / static_cast<std::size_t>(d);
  std::vector<cplx> out(lane.begin(), lane.begin() + static_cast<std::ptrdiff_t>(out_len));
  for (int k = 1; k < d; ++k)
    for (std::size_t m = 0; m < out_len; ++m) out[m] += lane[m + static_cast<std::size_t>(k) * out_len];
  return out;
}

inline MeasurementMatrix form_measurement(const LaneSampleBlock& block, int decimation) {
  const int N = block.window_len;
  const int P = block.pattern.num_lanes;
  const int L = block.pattern.grid_factor;
  if (decimation < 1 || N % decimation != 0)
    fail(errc::indivisible_window, "decimation " + std::to_string(decimation) +
                                       " does not divide window of " + std::to_string(N));
  const int Nd = N / decimation;
  const double T = block.pattern.period_s();
  const std::int64_t modulus = static_cast<std::int64_t>(L) * Nd;
  Eigen::MatrixXcd X(P, Nd);
  std::vector<cplx> lane(static_cast<std::size_t>(N));
  for (int p = 0; p < P; ++p) {
    for (int n = 0; n < N; ++n) lane[static_cast<std::size_t>(n)] = block.lanes(p, n);
    const auto spec = fft::forward(decimate_fold(lane, decimation));
    const std::int64_t c = block.pattern.cosets[static_cast<std::size_t>(p)];
    for (int n = 0; n < Nd; ++n) {
      const double angle = -two_pi * static_cast<double>((c * n) % modulus) / modulus;
      X(p, n) = T * std::polar(1.0, angle) * spec[static_cast<std::size_t>(n)];
    }
  }
  return MeasurementMatrix{std::move(X), block.pattern, N, decimation};
}

}  // namespace gbsense
