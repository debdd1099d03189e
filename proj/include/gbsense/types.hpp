#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gbsense {

inline constexpr const char* project_version = "0.1.0";

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

enum class errc {
  // pattern
  duplicate_coset,
  coset_out_of_range,
  not_sorted,
  first_coset_nonzero,
  too_few_lanes,
  invalid_dimensions,
  // signal
  overlapping_bands,
  band_out_of_range,
  zero_signal_power,
  // sampler
  signal_too_short,
  grid_mismatch,
  negative_jitter,
  frame_mismatch,
  // frontend
  indivisible_window,
  // recovery
  dimension_mismatch,
  rank_deficient_support,
  // harness
  occupancy_too_large,
  // files and config
  bad_magic,
  version_unsupported,
  truncated_file,
  io_failure,
  config_parse,
  invalid_value,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::duplicate_coset: return "DuplicateCoset";
    case errc::coset_out_of_range: return "CosetOutOfRange";
    case errc::not_sorted: return "NotSorted";
    case errc::first_coset_nonzero: return "FirstCosetNonzero";
    case errc::too_few_lanes: return "TooFewLanes";
    case errc::invalid_dimensions: return "InvalidDimensions";
    case errc::overlapping_bands: return "OverlappingBands";
    case errc::band_out_of_range: return "BandOutOfRange";
    case errc::zero_signal_power: return "ZeroSignalPower";
    case errc::signal_too_short: return "SignalTooShort";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::negative_jitter: return "NegativeJitter";
    case errc::frame_mismatch: return "FrameMismatch";
    case errc::indivisible_window: return "IndivisibleWindow";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::rank_deficient_support: return "RankDeficientSupport";
    case errc::occupancy_too_large: return "OccupancyTooLarge";
    case errc::bad_magic: return "BadMagic";
    case errc::version_unsupported: return "VersionUnsupported";
    case errc::truncated_file: return "TruncatedFile";
    case errc::io_failure: return "IoFailure";
    case errc::config_parse: return "ConfigParseError";
    case errc::invalid_value: return "InvalidValue";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

// splitmix64 finalizer; used to derive independent seed streams from one
// base seed so that pipeline stages never share generator state.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(base ^ (stream * 0x9e3779b97f4a7c15ull));
}

// Subband labeling. Spectra tile into L sections of the unshifted DFT axis
// (section 0 starts at DC); reports and ground truth use centered indices
// that increase with frequency starting at -floor(L/2)*fs, so DC falls in
// centered index floor(L/2). The two functions below convert between them.
inline int centered_from_section(int section, int grid_factor) {
  return (section + grid_factor / 2) % grid_factor;
}

inline int section_from_centered(int centered, int grid_factor) {
  return (centered + grid_factor - grid_factor / 2) % grid_factor;
}

}  // namespace gbsense
