#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gbsense/types.hpp"

namespace gbsense {

// Multicoset sampling pattern: P lanes at rate f_s, each offset by
// c_p * T / L on a grid of L positions per period T = 1/f_s.
struct SamplingPattern {
  int num_lanes = 0;         // P
  int grid_factor = 0;       // L, number of subbands
  std::vector<int> cosets;   // strictly increasing, cosets[0] == 0
  double lane_rate_hz = 50e6;

  double period_s() const { return 1.0 / lane_rate_hz; }
  double grid_rate_hz() const { return grid_factor * lane_rate_hz; }
  double average_rate_hz() const { return num_lanes * lane_rate_hz; }
};

inline SamplingPattern validate_pattern(int num_lanes, int grid_factor,
                                        std::vector<int> cosets,
                                        double lane_rate_hz = 50e6) {
  if (num_lanes < 1) fail(errc::invalid_dimensions, "need at least one lane");
  if (grid_factor <= num_lanes)
    fail(errc::too_few_lanes, "grid factor L=" + std::to_string(grid_factor) +
                                  " must exceed lane count P=" + std::to_string(num_lanes));
  if (static_cast<int>(cosets.size()) != num_lanes)
    fail(errc::invalid_dimensions, "expected " + std::to_string(num_lanes) + " cosets, got " +
                                       std::to_string(cosets.size()));
  if (!(lane_rate_hz > 0.0)) fail(errc::invalid_value, "lane rate must be positive");
  for (int c : cosets)
    if (c < 0 || c >= grid_factor)
      fail(errc::coset_out_of_range,
           "coset " + std::to_string(c) + " outside [0, " + std::to_string(grid_factor) + ")");
  for (std::size_t i = 1; i < cosets.size(); ++i) {
    if (cosets[i] == cosets[i - 1])
      fail(errc::duplicate_coset, "coset " + std::to_string(cosets[i]) + " repeated");
    if (cosets[i] < cosets[i - 1]) {
      // distinguish an unsorted list from one with duplicates elsewhere
      std::vector<int> sorted = cosets;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail(errc::duplicate_coset, "cosets contain duplicates");
      fail(errc::not_sorted, "cosets must be strictly increasing");
    }
  }
  if (cosets.front() != 0) fail(errc::first_coset_nonzero, "first coset must be 0");
  return SamplingPattern{num_lanes, grid_factor, std::move(cosets), lane_rate_hz};
}

// True when the pattern's delay grid T/L lands on the clock hardware's
// minimum phase step of 250 ps (half a 2 GHz VCO period). At the stock
// 50 MHz lane rate this holds exactly for L dividing 80. Advisory only,
// never a validation gate.
inline bool check_hardware_delay_grid(const SamplingPattern& pattern,
                                      double min_step_s = 250e-12) {
  const double step = pattern.period_s() / pattern.grid_factor;
  const double ratio = step / min_step_s;
  return std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1.0;
}

// P x L matrix A with A(p, l) = e^{+j 2 pi c_p l / L} (l zero-based).
// The exponent sign pairs with the e^{-j ...} phase correction applied in
// form_measurement; the pair is pinned by requiring X = A * Theta against
// the full-grid FFT of the signal.
struct SensingMatrix {
  Eigen::MatrixXcd entries;  // P x L, unit modulus
  SamplingPattern pattern;
};

inline SensingMatrix build_sensing_matrix(const SamplingPattern& pattern) {
  const int P = pattern.num_lanes;
  const int L = pattern.grid_factor;
  Eigen::MatrixXcd A(P, L);
  for (int p = 0; p < P; ++p) {
    const std::int64_t c = pattern.cosets[static_cast<std::size_t>(p)];
    for (int l = 0; l < L; ++l) {
      // reduce the phase mod 2 pi in exact integer arithmetic
      const std::int64_t num = (c * l) % L;
      A(p, l) = std::polar(1.0, two_pi * static_cast<double>(num) / L);
    }
  }
  return SensingMatrix{std::move(A), pattern};
}

/// Worst-case normalized column correlation, max |<a_i, a_j>| / P over i != j.
inline double pattern_coherence(const SensingMatrix& matrix) {
  const auto& A = matrix.entries;
  const double P = static_cast<double>(A.rows());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < A.cols(); ++i)
    for (Eigen::Index j = i + 1; j < A.cols(); ++j)
      worst = std::max(worst, std::abs(A.col(i).dot(A.col(j))));
  return std::min(1.0, worst / P);
}

enum class PatternStrategy { random, greedy_min_coherence };

namespace detail {

inline double partial_coherence(const std::vector<int>& cosets, int grid_factor) {
  SamplingPattern partial{static_cast<int>(cosets.size()), grid_factor, cosets, 50e6};
  return pattern_coherence(build_sensing_matrix(partial));
}

}  // namespace detail

// Coset selection. The random strategy draws P-1 distinct cosets from
// [1, L); greedy_min_coherence grows the set one coset at a time, picking
// the candidate whose partial sensing matrix has the lowest coherence
// (ties broken toward the smallest coset). c_1 = 0 is always forced.
inline SamplingPattern generate_pattern(int num_lanes, int grid_factor, PatternStrategy strategy,
                                        std::uint64_t seed, double lane_rate_hz = 50e6) {
  if (num_lanes < 1 || grid_factor <= num_lanes)
    fail(errc::invalid_dimensions, "need L > P >= 1, got P=" + std::to_string(num_lanes) +
                                       " L=" + std::to_string(grid_factor));
  std::vector<int> cosets{0};
  if (strategy == PatternStrategy::random) {
    std::vector<int> pool;
    for (int c = 1; c < grid_factor; ++c) pool.push_back(c);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < num_lanes - 1; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[pick(rng)]);
      cosets.push_back(pool[static_cast<std::size_t>(i)]);
    }
  } else {
    while (static_cast<int>(cosets.size()) < num_lanes) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = -1;
      for (int c = 1; c < grid_factor; ++c) {
        if (std::find(cosets.begin(), cosets.end(), c) != cosets.end()) continue;
        std::vector<int> trial = cosets;
        trial.push_back(c);
        std::sort(trial.begin(), trial.end());
        const double coh = detail::partial_coherence(trial, grid_factor);
        if (coh < best) {
          best = coh;
          best_c = c;
        }
      }
      cosets.push_back(best_c);
    }
  }
  std::sort(cosets.begin(), cosets.end());
  return validate_pattern(num_lanes, grid_factor, std::move(cosets), lane_rate_hz);
}

// --- plain-text pattern serialization (key=value lines) ------------------

inline std::string serialize_pattern(const SamplingPattern& pattern) {
  std::ostringstream out;
  out.precision(17);
  out << "P=" << pattern.num_lanes << "\n";
  out << "L=" << pattern.grid_factor << "\n";
  out << "fs_hz=" << pattern.lane_rate_hz << "\n";
  out << "cosets=";
  for (std::size_t i = 0; i < pattern.cosets.size(); ++i) {
    if (i) out << ",";
    out << pattern.cosets[i];
  }
  out << "\n";
  return out.str();
}

inline SamplingPattern parse_pattern(std::string_view text) {
  int P = -1, L = -1;
  double fs = 50e6;
  std::vector<int> cosets;
  bool have_cosets = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::config_parse, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "P") {
        P = std::stoi(value);
      } else if (key == "L") {
        L = std::stoi(value);
      } else if (key == "fs_hz") {
        fs = std::stod(value);
      } else if (key == "cosets") {
        std::istringstream vs(value);
        std::string tok;
        while (std::getline(vs, tok, ',')) cosets.push_back(std::stoi(tok));
        have_cosets = true;
      } else {
        fail(errc::config_parse,
             "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(errc::config_parse,
           "line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  if (P < 0 || L < 0 || !have_cosets)
    fail(errc::config_parse, "pattern file must define P, L and cosets");
  return validate_pattern(P, L, std::move(cosets), fs);
}

inline void save_pattern(const SamplingPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  out << serialize_pattern(pattern);
  if (!out) fail(errc::io_failure, "failed writing " + path);
}

inline SamplingPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern(buf.str());
}

}  // namespace gbsense
