#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gbsense/frontend.hpp"
#include "gbsense/pattern.hpp"
#include "gbsense/recovery.hpp"
#include "gbsense/sampler.hpp"
#include "gbsense/signal.hpp"
#include "gbsense/types.hpp"

namespace gbsense {

struct TrialConfig {
  SamplingPattern pattern;
  int window_len = 1024;  // N
  int decimation = 1;     // d
  double snr_db = 10.0;
  // Explicit occupancy, or auto-placed transmissions when occupancy_mhz >= 0.
  std::vector<BandSpec> bands;
  double occupancy_mhz = -1.0;
  RecoveryConfig recovery;
  double jitter_rms_s = 0.0;   // 0 keeps ideal extraction
  int link_frame_len = 0;      // 0 disables the link model
  int link_max_latency_frames = 0;
  std::uint64_t seed = 0;
};

struct StageTimings {
  double synthesize_s = 0.0;
  double acquire_s = 0.0;
  double frontend_s = 0.0;
  double recover_s = 0.0;
  double detect_s = 0.0;

  double total_s() const { return synthesize_s + acquire_s + frontend_s + recover_s + detect_s; }
};

struct TrialResult {
  std::set<int> truth;     // centered subband indices
  std::set<int> detected;  // centered subband indices
  double detection_probability = 0.0;
  bool no_truth = false;   // truth was empty; probability reported as 1 by convention
  int false_alarm_count = 0;
  StageTimings timings;
};

/// |truth AND detected| / |truth|; an empty truth set reports 1.0 so that
/// zero-occupancy points aggregate sensibly. False alarms never reduce it.
inline double detection_probability(const std::set<int>& truth, const std::set<int>& detected) {
  if (truth.empty()) return 1.0;
  std::size_t hit = 0;
  for (int s : truth) hit += detected.count(s);
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// Draws non-overlapping transmissions totalling occupancy_mhz: 100 MHz
// blocks plus one remainder band, all aligned to subband edges so a
// 100 MHz transmission occupies exactly two 50 MHz subbands. Centers are
// uniform over the free aligned slots.
inline std::vector<BandSpec> place_transmissions(double occupancy_mhz, int grid_factor,
                                                 double lane_rate_hz, std::mt19937_64& rng) {
  const double span_mhz = grid_factor * lane_rate_hz / 1e6;
  if (occupancy_mhz < 0.0 || occupancy_mhz > span_mhz)
    fail(errc::occupancy_too_large, std::to_string(occupancy_mhz) +
                                        " MHz exceeds the instantaneous bandwidth of " +
                                        std::to_string(span_mhz) + " MHz");
  std::vector<double> widths_hz;
  const int blocks = static_cast<int>(occupancy_mhz / 100.0);
  for (int i = 0; i < blocks; ++i) widths_hz.push_back(100e6);
  const double rem = occupancy_mhz - 100.0 * blocks;
  if (rem > 0.0) widths_hz.push_back(rem * 1e6);

  // the top section of an odd grid extends past +span/2 and cannot host an
  // aligned band, so exclude it
  const int usable = grid_factor - (grid_factor % 2);
  std::vector<char> taken(static_cast<std::size_t>(grid_factor), 0);
  std::vector<BandSpec> bands;
  for (double w : widths_hz) {
    const int sub = static_cast<int>(std::ceil(w / lane_rate_hz));
    if (sub > usable) fail(errc::occupancy_too_large, "band wider than the usable bandwidth");
    std::uniform_int_distribution<int> pick(0, usable - sub);
    bool placed = false;
    for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
      const int start = pick(rng);
      bool free = true;
      for (int s = start; s < start + sub; ++s)
        if (taken[static_cast<std::size_t>(s)]) {
          free = false;
          break;
        }
      if (!free) continue;
      for (int s = start; s < start + sub; ++s) taken[static_cast<std::size_t>(s)] = 1;
      const double lo = (start - grid_factor / 2) * lane_rate_hz;
      bands.push_back(BandSpec{lo + w / 2, w});
      placed = true;
    }
    if (!placed)
      fail(errc::occupancy_too_large, "could not place non-overlapping transmissions at " +
                                          std::to_string(occupancy_mhz) + " MHz");
  }
  return bands;
}

namespace detail {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const std::chrono::duration<double> dt = now - mark_;
    mark_ = now;
    return dt.count();
  }

 private:
  std::chrono::steady_clock::time_point mark_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// One end-to-end trial: synthesize -> acquire (ideal or jittered, optional
// link model) -> fold + measurement -> SOMP -> energy detection -> metric.
// Fully deterministic: every stage draws from a seed stream derived from
// config.seed.
inline TrialResult run_trial(const TrialConfig& config) {
  const SamplingPattern& pattern = config.pattern;
  const int L = pattern.grid_factor;

  std::vector<BandSpec> bands = config.bands;
  if (config.occupancy_mhz >= 0.0) {
    std::mt19937_64 rng(derive_seed(config.seed, 1));
    bands = place_transmissions(config.occupancy_mhz, L, pattern.lane_rate_hz, rng);
  }

  TrialResult result;
  detail::StageClock clock;

  const SignalConfig sig_cfg{L, config.window_len, pattern.lane_rate_hz};
  const GridSignal signal =
      synthesize_multiband(bands, sig_cfg, config.snr_db, derive_seed(config.seed, 2));
  result.truth = signal.truth_support;
  result.timings.synthesize_s = clock.lap();

  LaneSampleBlock block =
      config.jitter_rms_s > 0.0
          ? apply_timing_jitter(signal, pattern, config.window_len, config.jitter_rms_s,
                                derive_seed(config.seed, 3))
          : extract_lane_samples(signal, pattern, config.window_len);
  if (config.link_frame_len > 0)
    block = simulate_link_and_realign(block, config.link_frame_len,
                                      config.link_max_latency_frames, derive_seed(config.seed, 4))
                .block;
  result.timings.acquire_s = clock.lap();

  const MeasurementMatrix X = form_measurement(block, config.decimation);
  const SensingMatrix A = build_sensing_matrix(pattern);
  result.timings.frontend_s = clock.lap();

  const SpectrumEstimate estimate = somp(X, A, config.recovery);
  result.timings.recover_s = clock.lap();

  const double noise_floor = estimate_noise_floor(X, A, estimate);
  for (int section : energy_detect(estimate, noise_floor, config.recovery))
    result.detected.insert(centered_from_section(section, L));
  result.timings.detect_s = clock.lap();

  result.no_truth = result.truth.empty();
  result.detection_probability = detection_probability(result.truth, result.detected);
  for (int s : result.detected)
    if (!result.truth.count(s)) ++result.false_alarm_count;
  return result;
}

struct SweepPoint {
  double occupancy_mhz = 0.0;
  double mean_pd = 0.0;
  double ci95 = 0.0;  // normal-approximation 95% half-width
  int trials = 0;
};

// Detection probability versus occupancy. Trial t of point i runs with seed
// base.seed + i*trials + t, so every trial is an independent stream and the
// whole sweep is reproducible from the base seed.
inline std::vector<SweepPoint> sweep_occupancy(const TrialConfig& base,
                                               const std::vector<double>& occupancies_mhz,
                                               int trials) {
  if (trials < 1) fail(errc::invalid_value, "need at least one trial per point");
  std::vector<SweepPoint> curve;
  for (std::size_t i = 0; i < occupancies_mhz.size(); ++i) {
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      TrialConfig cfg = base;
      cfg.occupancy_mhz = occupancies_mhz[i];
      cfg.bands.clear();
      cfg.seed = base.seed + static_cast<std::uint64_t>(i) * trials + static_cast<std::uint64_t>(t);
      const double pd = run_trial(cfg).detection_probability;
      sum += pd;
      sum_sq += pd * pd;
    }
    const double mean = sum / trials;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * mean * mean) / (trials - 1)) : 0.0;
    curve.push_back(SweepPoint{occupancies_mhz[i], mean,
                               1.96 * std::sqrt(var / trials), trials});
  }
  return curve;
}

// Numerical check that the delay-then-sample and sample-then-realign paths
// produce the same lane spectra: random white signals on random valid
// patterns, reporting the worst elementwise relative difference.
inline double verify_equivalence(int trials, int window_len, std::uint64_t seed) {
  if (trials < 1) fail(errc::invalid_value, "need at least one trial");
  if (window_len < 1) fail(errc::invalid_value, "window length must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::uniform_int_distribution<int> pick_p(2, 8);
    const int P = pick_p(rng);
    std::uniform_int_distribution<int> pick_l(P + 1, 40);
    const int L = pick_l(rng);
    const SamplingPattern pattern =
        generate_pattern(P, L, PatternStrategy::random, rng());

    GridSignal signal;
    signal.grid_rate_hz = pattern.grid_rate_hz();
    signal.samples.resize(static_cast<std::size_t>(window_len) * L);
    for (auto& v : signal.samples) v = cplx{unit(rng), unit(rng)};

    const LaneSpectra mcs = spectral_path_mcs(signal, pattern, window_len);
    const LaneSpectra gbs = spectral_path_gbsense(signal, pattern, window_len);
    for (Eigen::Index r = 0; r < mcs.rows.rows(); ++r)
      for (Eigen::Index c = 0; c < mcs.rows.cols(); ++c) {
        const double mag = std::abs(mcs.rows(r, c));
        if (mag > 0.0)
          worst = std::max(worst, std::abs(mcs.rows(r, c) - gbs.rows(r, c)) / mag);
      }
  }
  return worst;
}

}  // namespace gbsense
