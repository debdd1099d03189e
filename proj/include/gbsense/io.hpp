#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gbsense/sampler.hpp"
#include "gbsense/signal.hpp"
#include "gbsense/types.hpp"

namespace gbsense::io {

inline constexpr std::array<char, 4> kMagic = {'G', 'B', 'S', 'N'};
inline constexpr std::uint32_t kFormatVersion = 1;

namespace detail {

inline void put_u32le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

inline void put_u64le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

inline void put_f64le(std::ostream& out, double v) {
  put_u64le(out, std::bit_cast<std::uint64_t>(v));
}

inline void put_f32le(std::ostream& out, float v) {
  put_u32le(out, std::bit_cast<std::uint32_t>(v));
}

inline void read_exact(std::istream& in, char* dst, std::size_t n, const std::string& path) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    fail(errc::truncated_file, path + " ends mid-record");
}

inline std::uint32_t get_u32le(std::istream& in, const std::string& path) {
  char b[4];
  read_exact(in, b, 4, path);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
  return v;
}

inline std::uint64_t get_u64le(std::istream& in, const std::string& path) {
  char b[8];
  read_exact(in, b, 8, path);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[i]);
  return v;
}

inline double get_f64le(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64le(in, path));
}

inline float get_f32le(std::istream& in, const std::string& path) {
  return std::bit_cast<float>(get_u32le(in, path));
}

inline void check_header(std::istream& in, const std::string& path) {
  char magic[4];
  read_exact(in, magic, 4, path);
  if (std::memcmp(magic, kMagic.data(), 4) != 0)
    fail(errc::bad_magic, path + " is not a GBSN container");
  const std::uint32_t version = get_u32le(in, path);
  if (version != kFormatVersion)
    fail(errc::version_unsupported,
         path + " has format version " + std::to_string(version) + ", expected " +
             std::to_string(kFormatVersion));
}

inline void write_samples_f32(std::ostream& out, const cplx* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    put_f32le(out, static_cast<float>(data[i].real()));
    put_f32le(out, static_cast<float>(data[i].imag()));
  }
}

}  // namespace detail

// --- IQ container: magic, version u32, rate f64, sample_count u64, then
// --- sample_count (f32 I, f32 Q) pairs, all little-endian -----------------

inline void write_grid_signal(const GridSignal& signal, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  out.write(kMagic.data(), 4);
  detail::put_u32le(out, kFormatVersion);
  detail::put_f64le(out, signal.grid_rate_hz);
  detail::put_u64le(out, signal.samples.size());
  detail::write_samples_f32(out, signal.samples.data(), signal.samples.size());
  if (!out) fail(errc::io_failure, "failed writing " + path);
}

inline GridSignal read_grid_signal(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  detail::check_header(in, path);
  GridSignal signal;
  signal.grid_rate_hz = detail::get_f64le(in, path);
  const std::uint64_t count = detail::get_u64le(in, path);
  signal.samples.resize(count);
  for (auto& v : signal.samples) {
    const float re = detail::get_f32le(in, path);
    const float im = detail::get_f32le(in, path);
    v = cplx{re, im};
  }
  return signal;
}

// --- lane-block container: the IQ header plus a trailing lane_count u32;
// --- sample_count is per lane and lanes are stored consecutively ----------

inline void write_lane_block(const LaneSampleBlock& block, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  out.write(kMagic.data(), 4);
  detail::put_u32le(out, kFormatVersion);
  detail::put_f64le(out, block.pattern.lane_rate_hz);
  detail::put_u64le(out, static_cast<std::uint64_t>(block.window_len));
  detail::put_u32le(out, static_cast<std::uint32_t>(block.pattern.num_lanes));
  std::vector<cplx> lane(static_cast<std::size_t>(block.window_len));
  for (int p = 0; p < block.pattern.num_lanes; ++p) {
    for (int n = 0; n < block.window_len; ++n) lane[static_cast<std::size_t>(n)] = block.lanes(p, n);
    detail::write_samples_f32(out, lane.data(), lane.size());
  }
  if (!out) fail(errc::io_failure, "failed writing " + path);
}

struct LaneBlockFile {
  Eigen::MatrixXcd lanes;  // P x N
  double lane_rate_hz = 0.0;
};

inline LaneBlockFile read_lane_block(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  detail::check_header(in, path);
  LaneBlockFile file;
  file.lane_rate_hz = detail::get_f64le(in, path);
  const std::uint64_t window = detail::get_u64le(in, path);
  const std::uint32_t lanes = detail::get_u32le(in, path);
  if (lanes == 0 || window == 0) fail(errc::truncated_file, path + " declares an empty block");
  file.lanes.resize(static_cast<Eigen::Index>(lanes), static_cast<Eigen::Index>(window));
  for (std::uint32_t p = 0; p < lanes; ++p)
    for (std::uint64_t n = 0; n < window; ++n) {
      const float re = detail::get_f32le(in, path);
      const float im = detail::get_f32le(in, path);
      file.lanes(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n)) = cplx{re, im};
    }
  return file;
}

// --- truth sidecar: comma-separated subband indices on one line -----------

inline void write_truth_sidecar(const std::set<int>& support, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  bool first = true;
  for (int s : support) {
    if (!first) out << ",";
    out << s;
    first = false;
  }
  out << "\n";
}

inline std::set<int> read_truth_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  std::set<int> support;
  std::string line;
  std::getline(in, line);
  std::istringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) support.insert(std::stoi(tok));
  return support;
}

// --- CSV helpers -----------------------------------------------------------

inline std::string format_complex(const cplx& v) {
  std::ostringstream out;
  out.precision(17);
  out << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "j";
  return out.str();
}

/// Diagnostic dump of a complex matrix, one row per lane, cells as "re+imj".
inline void write_complex_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << format_complex(m(r, c));
    }
    out << "\n";
  }
}

}  // namespace gbsense::io
