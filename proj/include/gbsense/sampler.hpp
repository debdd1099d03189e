#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gbsense/fft.hpp"
#include "gbsense/pattern.hpp"
#include "gbsense/signal.hpp"
#include "gbsense/types.hpp"

namespace gbsense {

// P parallel sub-Nyquist sample streams; row p holds the N samples of the
// lane with coset cosets[p], in pattern order.
struct LaneSampleBlock {
  Eigen::MatrixXcd lanes;  // P x N
  SamplingPattern pattern;
  int window_len = 0;
};

enum class SpectralPath { mcs_delay_path, gbsense_offset_path };

struct LaneSpectra {
  Eigen::MatrixXcd rows;  // P x N
  SpectralPath path;
};

namespace detail {

inline void check_extraction(const GridSignal& signal, const SamplingPattern& pattern, int N) {
  if (N < 1) fail(errc::invalid_dimensions, "window length must be positive");
  const double want = pattern.grid_rate_hz();
  if (std::abs(signal.grid_rate_hz - want) > 1e-6 * want)
    fail(errc::grid_mismatch, "signal grid rate " + std::to_string(signal.grid_rate_hz) +
                                  " Hz does not match pattern grid rate " +
                                  std::to_string(want) + " Hz");
  const std::size_t need = static_cast<std::size_t>(N) * pattern.grid_factor;
  if (signal.samples.size() < need)
    fail(errc::signal_too_short, "need " + std::to_string(need) + " grid samples, have " +
                                     std::to_string(signal.samples.size()));
}

}  // namespace detail

/// Ideal coset extraction: lane p, index n takes grid sample n*L + c_p.
inline LaneSampleBlock extract_lane_samples(const GridSignal& signal,
                                            const SamplingPattern& pattern, int N) {
  detail::check_extraction(signal, pattern, N);
  const int P = pattern.num_lanes;
  const int L = pattern.grid_factor;
  Eigen::MatrixXcd lanes(P, N);
  for (int p = 0; p < P; ++p) {
    const int c = pattern.cosets[static_cast<std::size_t>(p)];
    for (int n = 0; n < N; ++n)
      lanes(p, n) = signal.samples[static_cast<std::size_t>(n) * L + c];
  }
  return LaneSampleBlock{std::move(lanes), pattern, N};
}

// Delay-then-sample model: the analog delay shifts the signal, a uniform
// sampler takes every L-th grid point, and the lane spectrum is the plain
// N-point DFT of those samples.
inline LaneSpectra spectral_path_mcs(const GridSignal& signal, const SamplingPattern& pattern,
                                     int N) {
  LaneSampleBlock block = extract_lane_samples(signal, pattern, N);
  Eigen::MatrixXcd rows(pattern.num_lanes, N);
  std::vector<cplx> lane(static_cast<std::size_t>(N));
  for (int p = 0; p < pattern.num_lanes; ++p) {
    for (int n = 0; n < N; ++n) lane[static_cast<std::size_t>(n)] = block.lanes(p, n);
    const auto spec = fft::forward(lane);
    for (int n = 0; n < N; ++n) rows(p, n) = spec[static_cast<std::size_t>(n)];
  }
  return LaneSpectra{std::move(rows), SpectralPath::mcs_delay_path};
}

// Sample-then-realign model: the undelayed signal is sampled at the offset
// instants n*T + c_p*T/L, so the raw spectrum referenced to the true
// sampling times carries the factor e^{-j 2 pi f c_p T / L} per bin; the
// receiver's digital realignment multiplies it back out. Numerically this
// must agree with the delay-then-sample path at machine precision.
inline LaneSpectra spectral_path_gbsense(const GridSignal& signal, const SamplingPattern& pattern,
                                         int N) {
  LaneSampleBlock block = extract_lane_samples(signal, pattern, N);
  const int L = pattern.grid_factor;
  Eigen::MatrixXcd rows(pattern.num_lanes, N);
  std::vector<cplx> lane(static_cast<std::size_t>(N));
  const std::int64_t modulus = static_cast<std::int64_t>(N) * L;
  for (int p = 0; p < pattern.num_lanes; ++p) {
    for (int n = 0; n < N; ++n) lane[static_cast<std::size_t>(n)] = block.lanes(p, n);
    auto spec = fft::forward(lane);
    const std::int64_t c = pattern.cosets[static_cast<std::size_t>(p)];
    // spectrum of the impulse train at the physical instants
    for (int n = 0; n < N; ++n) {
      const double angle = -two_pi * static_cast<double>((c * n) % modulus) / modulus;
      spec[static_cast<std::size_t>(n)] *= std::polar(1.0, angle);
    }
    // digital realignment back onto the common lane timebase
    for (int n = 0; n < N; ++n) {
      const double angle = two_pi * static_cast<double>((c * n) % modulus) / modulus;
      spec[static_cast<std::size_t>(n)] *= std::polar(1.0, angle);
    }
    for (int n = 0; n < N; ++n) rows(p, n) = spec[static_cast<std::size_t>(n)];
  }
  return LaneSpectra{std::move(rows), SpectralPath::gbsense_offset_path};
}

namespace detail {

// Windowed-sinc interpolation kernel, half-width 32 grid steps under a
// Kaiser window with beta = 12. The grid oversamples every lane by L, so
// the kernel's error floor sits far below the jitter levels under study.
inline constexpr int kInterpHalfWidth = 32;
inline constexpr double kKaiserBeta = 12.0;

inline double interp_kernel(double t) {
  const double w = static_cast<double>(kInterpHalfWidth);
  if (t <= -w || t >= w) return 0.0;
  static const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  const double frac = t / w;
  const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - frac * frac)) / norm;
  if (t == 0.0) return window;
  const double pt = two_pi / 2.0 * t;
  return window * std::sin(pt) / pt;
}

// Band-limited evaluation at a fractional grid position; the DFT-grid
// signal is treated as circular.
inline cplx interpolate_circular(const std::vector<cplx>& x, double pos) {
  const auto size = static_cast<std::int64_t>(x.size());
  const std::int64_t base = static_cast<std::int64_t>(std::floor(pos));
  cplx acc{0.0, 0.0};
  for (int k = -kInterpHalfWidth + 1; k <= kInterpHalfWidth; ++k) {
    const std::int64_t tap = base + k;
    std::int64_t idx = tap % size;
    if (idx < 0) idx += size;
    acc += x[static_cast<std::size_t>(idx)] * interp_kernel(pos - static_cast<double>(tap));
  }
  return acc;
}

}  // namespace detail

// Perturbs every sampling instant n*T + c_p*T/L by i.i.d. Gaussian jitter
// of the given RMS (seconds) and resamples the grid signal there. The
// deviates are drawn as standard normals and scaled, so a fixed seed gives
// sample errors that grow monotonically with the RMS. Zero RMS reproduces
// extract_lane_samples bit for bit.
inline LaneSampleBlock apply_timing_jitter(const GridSignal& signal,
                                           const SamplingPattern& pattern, int N,
                                           double rms_jitter_s, std::uint64_t seed) {
  if (rms_jitter_s < 0.0) fail(errc::negative_jitter, "jitter RMS must be nonnegative");
  if (rms_jitter_s == 0.0) return extract_lane_samples(signal, pattern, N);
  detail::check_extraction(signal, pattern, N);
  const int P = pattern.num_lanes;
  const int L = pattern.grid_factor;
  const double grid_step_s = 1.0 / signal.grid_rate_hz;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;
  Eigen::MatrixXcd lanes(P, N);
  for (int p = 0; p < P; ++p) {
    const int c = pattern.cosets[static_cast<std::size_t>(p)];
    for (int n = 0; n < N; ++n) {
      const double nominal = static_cast<double>(n) * L + c;  // grid steps
      const double offset = unit(rng) * rms_jitter_s / grid_step_s;
      lanes(p, n) = detail::interpolate_circular(signal.samples, nominal + offset);
    }
  }
  return LaneSampleBlock{std::move(lanes), pattern, N};
}

struct LinkDiagnostics {
  std::vector<int> lane_latency_frames;
  int realign_frame = 0;  // slot at which the slowest lane's first frame arrived
};

struct LinkResult {
  LaneSampleBlock block;
  LinkDiagnostics diagnostics;
};

// Frame-granular model of the serial link: each lane is assigned a random
// integer latency, frames arrive interleaved accordingly, and the receiver
// buffers until the slowest lane's first frame before emitting realigned
// output. Latency is absorbed by the buffer, so the payload survives
// bit-identically for every latency assignment within bounds.
inline LinkResult simulate_link_and_realign(const LaneSampleBlock& block, int frame_len,
                                            int max_latency_frames, std::uint64_t seed) {
  const int N = block.window_len;
  const int P = block.pattern.num_lanes;
  if (frame_len < 1 || N % frame_len != 0)
    fail(errc::frame_mismatch, "frame length " + std::to_string(frame_len) +
                                   " does not divide the window of " + std::to_string(N));
  if (max_latency_frames < 0) fail(errc::invalid_value, "latency bound must be nonnegative");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, max_latency_frames);
  std::vector<int> latency(static_cast<std::size_t>(P));
  for (auto& v : latency) v = pick(rng);
  const int realign = *std::max_element(latency.begin(), latency.end());
  const int frames = N / frame_len;

  // arrival bookkeeping: slot t carries frame (t - latency[p]) of lane p
  LinkResult result{LaneSampleBlock{Eigen::MatrixXcd::Zero(P, N), block.pattern, N},
                    LinkDiagnostics{latency, realign}};
  std::vector<std::vector<int>> buffered(static_cast<std::size_t>(P));
  const int last_slot = realign + frames - 1;
  for (int slot = 0; slot <= last_slot; ++slot) {
    for (int p = 0; p < P; ++p) {
      const int seq = slot - latency[static_cast<std::size_t>(p)];
      if (seq >= 0 && seq < frames) buffered[static_cast<std::size_t>(p)].push_back(seq);
    }
  }
  for (int p = 0; p < P; ++p) {
    auto& queue = buffered[static_cast<std::size_t>(p)];
    if (static_cast<int>(queue.size()) != frames)
      fail(errc::frame_mismatch, "link model lost frames on lane " + std::to_string(p));
    for (int f = 0; f < frames; ++f) {
      const int seq = queue[static_cast<std::size_t>(f)];
      result.block.lanes.row(p).segment(seq * frame_len, frame_len) =
          block.lanes.row(p).segment(seq * frame_len, frame_len);
    }
  }
  return result;
}

}  // namespace gbsense
