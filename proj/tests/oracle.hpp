// Test-only reference implementations. Everything here recomputes results
// through routes independent of the code under test: quadratic DFTs, the
// full-grid spectrum tiling for the forward model, and plain-loop coherence.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "gbsense/fft.hpp"
#include "gbsense/pattern.hpp"
#include "gbsense/signal.hpp"
#include "gbsense/types.hpp"

namespace oracle {

using gbsense::cplx;

/// O(n^2) DFT, sign = -1 forward / +1 backward (unnormalized).
inline std::vector<cplx> naive_dft(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) {
      const double angle =
          sign * gbsense::two_pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      acc += x[m] * std::polar(1.0, angle);
    }
    out[k] = acc;
  }
  return out;
}

// Reference Theta for X = A * Theta: fold the grid signal by d (segment
// length N'*L), take the full-grid FFT, slice it into L contiguous rows of
// N' bins, and scale by T/L. This never touches the per-lane path.
inline Eigen::MatrixXcd theta_reference(const gbsense::GridSignal& signal,
                                        const gbsense::SamplingPattern& pattern, int N, int d) {
  const int L = pattern.grid_factor;
  const int Nd = N / d;
  const std::size_t segment = static_cast<std::size_t>(Nd) * L;
  std::vector<cplx> folded(signal.samples.begin(),
                           signal.samples.begin() + static_cast<std::ptrdiff_t>(segment));
  for (int k = 1; k < d; ++k)
    for (std::size_t m = 0; m < segment; ++m)
      folded[m] += signal.samples[m + static_cast<std::size_t>(k) * segment];
  const auto theta_flat = gbsense::fft::forward(folded);
  const double scale = pattern.period_s() / L;
  Eigen::MatrixXcd theta(L, Nd);
  for (int l = 0; l < L; ++l)
    for (int n = 0; n < Nd; ++n)
      theta(l, n) = scale * theta_flat[static_cast<std::size_t>(l) * Nd + n];
  return theta;
}

/// Plain-loop coherence, no linear algebra library involved.
inline double coherence_brute(const gbsense::SamplingPattern& pattern) {
  const int P = pattern.num_lanes;
  const int L = pattern.grid_factor;
  double worst = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      cplx dot{0.0, 0.0};
      for (int p = 0; p < P; ++p) {
        const double ai = gbsense::two_pi * pattern.cosets[static_cast<std::size_t>(p)] * i / L;
        const double aj = gbsense::two_pi * pattern.cosets[static_cast<std::size_t>(p)] * j / L;
        dot += std::polar(1.0, aj - ai);
      }
      worst = std::max(worst, std::abs(dot) / P);
    }
  return worst;
}

inline double frobenius(const Eigen::MatrixXcd& m) { return m.norm(); }

inline double relative_frobenius_error(const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) {
  return (got - want).norm() / want.norm();
}

}  // namespace oracle
