#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gbsense/fft.hpp"
#include "gbsense/types.hpp"

namespace gbsense {

// One occupied band: center frequency within [-L*fs/2, +L*fs/2), width in Hz.
// Bands wider than fs legitimately span several subbands.
struct BandSpec {
  double center_hz = 0.0;
  double width_hz = 0.0;

  double lo_hz() const { return center_hz - width_hz / 2; }
  double hi_hz() const { return center_hz + width_hz / 2; }
};

struct SignalConfig {
  int grid_factor = 40;       // L
  int window_len = 1024;      // N samples per lane
  double lane_rate_hz = 50e6; // f_s
};

// Complex baseband samples on the Nyquist grid at rate L*f_s, with the
// ground-truth set of active subbands (centered indices).
struct GridSignal {
  std::vector<cplx> samples;  // length N*L
  double grid_rate_hz = 0.0;
  std::set<int> truth_support;
};

inline double mean_power(const std::vector<cplx>& x) {
  double acc = 0.0;
  for (const auto& v : x) acc += std::norm(v);
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

namespace detail {

// A band maps onto the unshifted DFT circle [0, L*fs) as one interval, or
// two when it straddles DC's negative side.
inline std::vector<std::pair<double, double>> circle_pieces(const BandSpec& band, double span) {
  const double lo = band.lo_hz(), hi = band.hi_hz();
  if (lo < 0.0 && hi > 0.0) return {{lo + span, span}, {0.0, hi}};
  if (hi <= 0.0) return {{lo + span, hi + span}};
  return {{lo, hi}};
}

inline void check_band_in_range(const BandSpec& band, double span) {
  if (!(band.width_hz > 0.0))
    fail(errc::band_out_of_range, "band width must be positive");
  if (band.lo_hz() < -span / 2 || band.hi_hz() > span / 2)
    fail(errc::band_out_of_range,
         "band [" + std::to_string(band.lo_hz()) + ", " + std::to_string(band.hi_hz()) +
             ") Hz outside the instantaneous bandwidth of " + std::to_string(span) + " Hz");
}

}  // namespace detail

// Set of centered subband indices whose frequency interval overlaps any
// band with nonzero measure; edges that merely touch do not activate.
inline std::set<int> ground_truth_support(const std::vector<BandSpec>& bands, int grid_factor,
                                          double lane_rate_hz) {
  const double span = grid_factor * lane_rate_hz;
  std::set<int> support;
  for (const auto& band : bands) {
    detail::check_band_in_range(band, span);
    for (const auto& [plo, phi] : detail::circle_pieces(band, span)) {
      for (int l = 0; l < grid_factor; ++l) {
        const double slo = l * lane_rate_hz;
        const double shi = slo + lane_rate_hz;
        if (std::min(phi, shi) - std::max(plo, slo) > 0.0)
          support.insert(centered_from_section(l, grid_factor));
      }
    }
  }
  return support;
}

// Sparse multiband synthesis: each band gets i.i.d. CN(0,1) coefficients on
// the active bins of the N*L-point grid, inverse transformed, then white
// complex Gaussian noise is added so that
// (total signal power) / (total noise power) = 10^(snr_db/10) in expectation.
// snr_db = +infinity disables noise. With no bands the output is pure noise
// of unit per-sample variance (an SNR relative to zero signal is undefined).
inline GridSignal synthesize_multiband(const std::vector<BandSpec>& bands,
                                       const SignalConfig& config, double snr_db,
                                       std::uint64_t seed) {
  const int L = config.grid_factor;
  const double fs = config.lane_rate_hz;
  const double span = L * fs;
  const std::size_t total = static_cast<std::size_t>(config.window_len) * L;
  if (L < 1 || config.window_len < 1) fail(errc::invalid_dimensions, "bad signal config");

  std::vector<BandSpec> sorted = bands;
  std::sort(sorted.begin(), sorted.end(),
            [](const BandSpec& a, const BandSpec& b) { return a.lo_hz() < b.lo_hz(); });
  for (const auto& band : sorted) detail::check_band_in_range(band, span);
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1].hi_hz() > sorted[i].lo_hz())
      fail(errc::overlapping_bands, "bands centered at " +
                                        std::to_string(sorted[i - 1].center_hz) + " and " +
                                        std::to_string(sorted[i].center_hz) + " Hz overlap");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;

  GridSignal out;
  out.grid_rate_hz = span;
  out.truth_support = ground_truth_support(bands, L, fs);

  std::vector<std::pair<double, double>> pieces;
  for (const auto& band : bands)
    for (const auto& piece : detail::circle_pieces(band, span)) pieces.push_back(piece);

  std::vector<cplx> spectrum(total, cplx{0.0, 0.0});
  const double bin_hz = span / static_cast<double>(total);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < total; ++k) {
    const double f = k * bin_hz;
    bool active = false;
    for (const auto& [plo, phi] : pieces)
      if (f >= plo && f < phi) {
        active = true;
        break;
      }
    if (active) spectrum[k] = cplx{unit(rng) * inv_sqrt2, unit(rng) * inv_sqrt2};
  }
  out.samples = fft::inverse(spectrum);

  if (std::isfinite(snr_db)) {
    const double ps = mean_power(out.samples);
    const double var = bands.empty() ? 1.0 : ps / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(var / 2.0);
    for (auto& v : out.samples) v += cplx{unit(rng) * sigma, unit(rng) * sigma};
  }
  return out;
}

// Adds circular complex white Gaussian noise with per-sample variance
// signal_power / 10^(snr_db/10). Ground truth is untouched. snr_db = +inf
// returns the input unchanged.
inline GridSignal add_noise(const GridSignal& signal, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) return signal;
  const double ps = mean_power(signal.samples);
  if (ps <= 0.0) fail(errc::zero_signal_power, "cannot scale noise against a zero signal");
  GridSignal out = signal;
  const double sigma = std::sqrt(ps / std::pow(10.0, snr_db / 10.0) / 2.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;
  for (auto& v : out.samples) v += cplx{unit(rng) * sigma, unit(rng) * sigma};
  return out;
}

}  // namespace gbsense
