#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gbsense/harness.hpp"
#include "gbsense/io.hpp"
#include "gbsense/pattern.hpp"
#include "gbsense/recovery.hpp"
#include "gbsense/types.hpp"

namespace gbsense::cli {

// Exit codes: 0 success, 1 usage/config error, 2 data-format error,
// 3 acceptance failure (equivalence above tolerance).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataFormat = 2;
inline constexpr int kExitAcceptance = 3;

// --- flat key=value config ---------------------------------------------

class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto end = line.find_last_not_of(" \t\r");
      line = end == std::string::npos ? "" : line.substr(0, end + 1);
      const auto start = line.find_first_not_of(" \t");
      if (start == std::string::npos) continue;
      line = line.substr(start);
      const auto eq = line.find('=');
      if (eq == std::string::npos || eq == 0)
        fail(errc::config_parse,
             origin + " line " + std::to_string(lineno) + ": expected key=value");
      cfg.entries_[line.substr(0, eq)] = Entry{line.substr(eq + 1), lineno};
    }
    return cfg;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::config_parse, "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  template <typename T>
  T get_num(const std::string& key, T fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::istringstream ss(it->second.value);
    T out{};
    ss >> out;
    if (ss.fail())
      fail(errc::config_parse, origin_ + " line " + std::to_string(it->second.line) +
                                   ": bad value for key '" + key + "'");
    return out;
  }

  void check_known(const std::set<std::string>& known) const {
    for (const auto& [key, entry] : entries_)
      if (!known.count(key))
        fail(errc::config_parse, origin_ + " line " + std::to_string(entry.line) +
                                     ": unknown key '" + key + "'");
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_ = "<config>";
};

// --- helpers ---------------------------------------------------------------

namespace detail {

inline std::string output_path(const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute()) return name;
  if (const char* dir = std::getenv("GBSENSE_OUT"); dir && *dir)
    return (std::filesystem::path(dir) / p).string();
  return name;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ",";
    out << v[i];
  }
  return out.str();
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace detail

// Every run writes one manifest next to its primary output: the fully
// resolved configuration plus provenance. Re-running `simulate` from a
// manifest reproduces the CSV byte for byte (timestamps live only here).
class RunManifest {
 public:
  RunManifest(std::string command, std::uint64_t seed) {
    json_["tool"] = "gbsense";
    json_["version"] = project_version;
    json_["command"] = std::move(command);
    json_["created_utc"] = detail::utc_timestamp();
    json_["seed"] = seed;
    json_["config"] = nlohmann::json::object();
    json_["outputs"] = nlohmann::json::array();
  }

  void set_config(const std::string& key, const std::string& value) {
    json_["config"][key] = value;
  }

  void add_output(const std::string& path) { json_["outputs"].push_back(path); }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(errc::io_failure, "cannot open " + path + " for writing");
    out << json_.dump(2) << "\n";
  }

  static ConfigFile reload_config(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) fail(errc::config_parse, "cannot open manifest " + manifest_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(errc::config_parse, manifest_path + ": " + e.what());
    }
    std::ostringstream flat;
    for (const auto& [key, value] : j.at("config").items())
      flat << key << "=" << value.get<std::string>() << "\n";
    return ConfigFile::parse(flat.str(), manifest_path);
  }

 private:
  nlohmann::json json_;
};

// --- resolved simulate configuration ----------------------------------------

struct SimulateSettings {
  SamplingPattern pattern;
  int window_len = 1024;
  int decimation = 1;
  double snr_db = 10.0;
  std::vector<double> occupancies_mhz{50, 100, 150, 200, 300, 400};
  int trials = 500;
  std::uint64_t seed = 1;
  RecoveryConfig recovery;
  double jitter_rms_s = 0.0;
  int link_frame_len = 0;
  int link_max_latency_frames = 0;
  std::string out_prefix = "gbsense-sweep";
};

inline const std::set<std::string>& simulate_config_keys() {
  static const std::set<std::string> keys = {
      "pattern.P",          "pattern.L",         "pattern.fs_hz",
      "pattern.cosets",     "pattern.file",      "pattern.strategy",
      "pattern.seed",       "window.N",          "window.d",
      "snr_db",             "occupancy_mhz",     "trials",
      "seed",               "recovery.max_support", "recovery.residual_tol",
      "recovery.gamma",     "jitter.rms_s",      "link.frame_len",
      "link.max_latency_frames",                 "out.prefix",
  };
  return keys;
}

inline SamplingPattern resolve_pattern_config(const ConfigFile& cfg) {
  const int P = cfg.get_num<int>("pattern.P", 8);
  const int L = cfg.get_num<int>("pattern.L", 40);
  const double fs = cfg.get_num<double>("pattern.fs_hz", 50e6);
  if (cfg.has("pattern.cosets"))
    return validate_pattern(P, L, detail::parse_int_list(cfg.get("pattern.cosets", "")), fs);
  if (cfg.has("pattern.file")) return load_pattern(cfg.get("pattern.file", ""));
  const std::string strategy = cfg.get("pattern.strategy", "random");
  if (strategy != "random" && strategy != "greedy_min_coherence")
    fail(errc::config_parse, "unknown pattern.strategy '" + strategy + "'");
  return generate_pattern(P, L,
                          strategy == "random" ? PatternStrategy::random
                                               : PatternStrategy::greedy_min_coherence,
                          cfg.get_num<std::uint64_t>("pattern.seed", 7), fs);
}

inline SimulateSettings resolve_simulate(const ConfigFile& cfg) {
  cfg.check_known(simulate_config_keys());
  SimulateSettings s;
  s.pattern = resolve_pattern_config(cfg);
  s.window_len = cfg.get_num<int>("window.N", 1024);
  s.decimation = cfg.get_num<int>("window.d", 1);
  s.snr_db = cfg.get_num<double>("snr_db", 10.0);
  if (cfg.has("occupancy_mhz"))
    s.occupancies_mhz = detail::parse_double_list(cfg.get("occupancy_mhz", ""));
  s.trials = cfg.get_num<int>("trials", 500);
  s.seed = cfg.get_num<std::uint64_t>("seed", 1);
  s.recovery.max_support = cfg.get_num<int>("recovery.max_support", 0);
  s.recovery.residual_tol = cfg.get_num<double>("recovery.residual_tol", 1e-6);
  s.recovery.ed_threshold_factor = cfg.get_num<double>("recovery.gamma", 8.0);
  s.jitter_rms_s = cfg.get_num<double>("jitter.rms_s", 0.0);
  s.link_frame_len = cfg.get_num<int>("link.frame_len", 0);
  s.link_max_latency_frames = cfg.get_num<int>("link.max_latency_frames", 0);
  s.out_prefix = cfg.get("out.prefix", "gbsense-sweep");
  return s;
}

inline void record_simulate_config(RunManifest& manifest, const SimulateSettings& s) {
  manifest.set_config("pattern.P", std::to_string(s.pattern.num_lanes));
  manifest.set_config("pattern.L", std::to_string(s.pattern.grid_factor));
  manifest.set_config("pattern.fs_hz", detail::format_double(s.pattern.lane_rate_hz));
  manifest.set_config("pattern.cosets", detail::join_ints(s.pattern.cosets));
  manifest.set_config("window.N", std::to_string(s.window_len));
  manifest.set_config("window.d", std::to_string(s.decimation));
  manifest.set_config("snr_db", detail::format_double(s.snr_db));
  std::ostringstream occ;
  for (std::size_t i = 0; i < s.occupancies_mhz.size(); ++i) {
    if (i) occ << ",";
    occ << detail::format_double(s.occupancies_mhz[i]);
  }
  manifest.set_config("occupancy_mhz", occ.str());
  manifest.set_config("trials", std::to_string(s.trials));
  manifest.set_config("seed", std::to_string(s.seed));
  manifest.set_config("recovery.max_support", std::to_string(s.recovery.max_support));
  manifest.set_config("recovery.residual_tol", detail::format_double(s.recovery.residual_tol));
  manifest.set_config("recovery.gamma", detail::format_double(s.recovery.ed_threshold_factor));
  manifest.set_config("jitter.rms_s", detail::format_double(s.jitter_rms_s));
  manifest.set_config("link.frame_len", std::to_string(s.link_frame_len));
  manifest.set_config("link.max_latency_frames", std::to_string(s.link_max_latency_frames));
  manifest.set_config("out.prefix", s.out_prefix);
}

// --- subcommands -------------------------------------------------------------

inline int cmd_simulate(const SimulateSettings& s, std::ostream& log) {
  TrialConfig base;
  base.pattern = s.pattern;
  base.window_len = s.window_len;
  base.decimation = s.decimation;
  base.snr_db = s.snr_db;
  base.recovery = s.recovery;
  base.jitter_rms_s = s.jitter_rms_s;
  base.link_frame_len = s.link_frame_len;
  base.link_max_latency_frames = s.link_max_latency_frames;
  base.seed = s.seed;

  const auto curve = sweep_occupancy(base, s.occupancies_mhz, s.trials);

  const std::string csv_path = detail::output_path(s.out_prefix + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) fail(errc::io_failure, "cannot open " + csv_path + " for writing");
  csv << "occupancy_mhz,mean_pd,ci95,trials,snr_db\n";
  csv.precision(10);
  for (const auto& point : curve) {
    csv << point.occupancy_mhz << "," << point.mean_pd << "," << point.ci95 << ","
        << point.trials << "," << s.snr_db << "\n";
    log << "occupancy " << std::setw(6) << point.occupancy_mhz << " MHz  mean pd "
        << std::fixed << std::setprecision(4) << point.mean_pd << "  ci95 "
        << point.ci95 << std::defaultfloat << std::setprecision(10) << "\n";
  }
  csv.close();

  RunManifest manifest("simulate", s.seed);
  record_simulate_config(manifest, s);
  manifest.add_output(csv_path);
  const std::string manifest_path = detail::output_path(s.out_prefix + ".manifest.json");
  manifest.write(manifest_path);
  log << "wrote " << csv_path << " and " << manifest_path << "\n";
  return kExitOk;
}

struct ReconstructArgs {
  std::string input_path;
  std::string pattern_path;
  bool lane_block = false;
  int decimation = 1;
  int window_len = 0;  // 0: use everything the file provides
  RecoveryConfig recovery;
  std::string out_csv = "gbsense-report.csv";
};

inline int cmd_reconstruct(const ReconstructArgs& args, std::ostream& log) {
  const SamplingPattern pattern = load_pattern(args.pattern_path);
  const int L = pattern.grid_factor;

  LaneSampleBlock block;
  if (args.lane_block) {
    const io::LaneBlockFile file = io::read_lane_block(args.input_path);
    if (file.lanes.rows() != pattern.num_lanes)
      fail(errc::grid_mismatch, "file has " + std::to_string(file.lanes.rows()) +
                                    " lanes, pattern expects " +
                                    std::to_string(pattern.num_lanes));
    if (std::abs(file.lane_rate_hz - pattern.lane_rate_hz) > 1e-6 * pattern.lane_rate_hz)
      fail(errc::grid_mismatch, "file lane rate does not match the pattern");
    block = LaneSampleBlock{file.lanes, pattern, static_cast<int>(file.lanes.cols())};
  } else {
    GridSignal signal = io::read_grid_signal(args.input_path);
    const int full_windows = static_cast<int>(signal.samples.size()) / L;
    if (full_windows < 1)
      fail(errc::truncated_file, args.input_path + " holds less than one grid period");
    block = extract_lane_samples(signal, pattern, full_windows);
  }
  if (args.window_len > 0) {
    if (args.window_len > block.window_len)
      fail(errc::signal_too_short, "requested window exceeds the snapshot length");
    block = LaneSampleBlock{block.lanes.leftCols(args.window_len).eval(), pattern,
                            args.window_len};
  }

  const MeasurementMatrix X = form_measurement(block, args.decimation);
  const SensingMatrix A = build_sensing_matrix(pattern);
  const SpectrumEstimate estimate = somp(X, A, args.recovery);
  const double noise_floor = estimate_noise_floor(X, A, estimate);
  const std::set<int> active = energy_detect(estimate, noise_floor, args.recovery);

  const std::string csv_path = detail::output_path(args.out_csv);
  std::ofstream csv(csv_path);
  if (!csv) fail(errc::io_failure, "cannot open " + csv_path + " for writing");
  csv << "subband,energy,detected\n";
  csv.precision(10);
  for (int s = 0; s < L; ++s) {
    const int section = section_from_centered(s, L);
    csv << s << "," << estimate.subband_energy[static_cast<std::size_t>(section)] << ","
        << (active.count(section) ? 1 : 0) << "\n";
  }
  csv.close();

  log << "detected subbands:";
  for (int section : active) log << " " << centered_from_section(section, L);
  log << "\n";
  log << "noise floor per subband: " << noise_floor << "\n";

  RunManifest manifest("reconstruct", 0);
  manifest.set_config("input", args.input_path);
  manifest.set_config("pattern.cosets", detail::join_ints(pattern.cosets));
  manifest.set_config("pattern.P", std::to_string(pattern.num_lanes));
  manifest.set_config("pattern.L", std::to_string(L));
  manifest.set_config("pattern.fs_hz", detail::format_double(pattern.lane_rate_hz));
  manifest.set_config("window.d", std::to_string(args.decimation));
  manifest.set_config("window.N", std::to_string(block.window_len));
  manifest.set_config("lane_block", args.lane_block ? "1" : "0");
  manifest.set_config("recovery.max_support", std::to_string(args.recovery.max_support));
  manifest.set_config("recovery.residual_tol",
                      detail::format_double(args.recovery.residual_tol));
  manifest.set_config("recovery.gamma",
                      detail::format_double(args.recovery.ed_threshold_factor));
  manifest.add_output(csv_path);
  manifest.write(csv_path + ".manifest.json");
  return kExitOk;
}

struct GensigArgs {
  std::string out_path = "gbsense-signal.iq";
  std::optional<std::string> pattern_path;
  int num_lanes = 8;
  int grid_factor = 40;
  double lane_rate_hz = 50e6;
  int window_len = 1024;
  std::vector<std::string> band_specs;  // "center_mhz:width_mhz"
  double occupancy_mhz = -1.0;
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 1;
  bool dump_lanes = false;
};

inline int cmd_gensig(const GensigArgs& args, std::ostream& log) {
  const SamplingPattern pattern =
      args.pattern_path ? load_pattern(*args.pattern_path)
                        : generate_pattern(args.num_lanes, args.grid_factor,
                                           PatternStrategy::random, 7, args.lane_rate_hz);
  std::vector<BandSpec> bands;
  for (const auto& spec : args.band_specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
      fail(errc::invalid_value, "band '" + spec + "' is not center_mhz:width_mhz");
    try {
      bands.push_back(BandSpec{std::stod(spec.substr(0, colon)) * 1e6,
                               std::stod(spec.substr(colon + 1)) * 1e6});
    } catch (const std::exception&) {
      fail(errc::invalid_value, "band '" + spec + "' is not center_mhz:width_mhz");
    }
  }
  if (args.occupancy_mhz >= 0.0) {
    std::mt19937_64 rng(derive_seed(args.seed, 1));
    const auto placed =
        place_transmissions(args.occupancy_mhz, pattern.grid_factor, pattern.lane_rate_hz, rng);
    bands.insert(bands.end(), placed.begin(), placed.end());
  }

  const SignalConfig cfg{pattern.grid_factor, args.window_len, pattern.lane_rate_hz};
  const GridSignal signal =
      synthesize_multiband(bands, cfg, args.snr_db, derive_seed(args.seed, 2));

  const std::string iq_path = detail::output_path(args.out_path);
  io::write_grid_signal(signal, iq_path);
  io::write_truth_sidecar(signal.truth_support, iq_path + ".truth");

  RunManifest manifest("gensig", args.seed);
  manifest.set_config("pattern.P", std::to_string(pattern.num_lanes));
  manifest.set_config("pattern.L", std::to_string(pattern.grid_factor));
  manifest.set_config("pattern.fs_hz", detail::format_double(pattern.lane_rate_hz));
  manifest.set_config("pattern.cosets", detail::join_ints(pattern.cosets));
  manifest.set_config("window.N", std::to_string(args.window_len));
  manifest.set_config("snr_db", detail::format_double(args.snr_db));
  manifest.set_config("seed", std::to_string(args.seed));
  std::ostringstream bands_text;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (i) bands_text << ";";
    bands_text << detail::format_double(bands[i].center_hz / 1e6) << ":"
               << detail::format_double(bands[i].width_hz / 1e6);
  }
  manifest.set_config("bands_mhz", bands_text.str());
  manifest.add_output(iq_path);
  manifest.add_output(iq_path + ".truth");

  if (args.dump_lanes) {
    const LaneSampleBlock block = extract_lane_samples(signal, pattern, args.window_len);
    const std::string lane_path = iq_path + ".lanes";
    io::write_lane_block(block, lane_path);
    manifest.add_output(lane_path);
    log << "wrote " << lane_path << "\n";
  }
  manifest.write(iq_path + ".manifest.json");

  log << "wrote " << iq_path << " (" << signal.samples.size() << " samples, truth:";
  for (int s : signal.truth_support) log << " " << s;
  log << ")\n";
  return kExitOk;
}

struct EquivalenceArgs {
  int trials = 200;
  int window_len = 256;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

inline int cmd_equivalence(const EquivalenceArgs& args, std::ostream& log) {
  const double err = verify_equivalence(args.trials, args.window_len, args.seed);
  log << "max relative error over " << args.trials << " trials: " << err << "\n";
  RunManifest manifest("equivalence", args.seed);
  manifest.set_config("trials", std::to_string(args.trials));
  manifest.set_config("window.N", std::to_string(args.window_len));
  manifest.set_config("seed", std::to_string(args.seed));
  manifest.set_config("tolerance", detail::format_double(args.tolerance));
  manifest.write(detail::output_path("gbsense-equivalence.manifest.json"));
  if (err > args.tolerance) {
    log << "FAIL: error above tolerance " << args.tolerance << "\n";
    return kExitAcceptance;
  }
  return kExitOk;
}

struct PatternArgs {
  int num_lanes = 8;
  int grid_factor = 40;
  std::string strategy = "random";
  std::uint64_t seed = 7;
  double lane_rate_hz = 50e6;
  std::string out_path = "gbsense-pattern.txt";
};

inline int cmd_pattern(const PatternArgs& args, std::ostream& log) {
  if (args.strategy != "random" && args.strategy != "greedy_min_coherence")
    fail(errc::invalid_value, "unknown strategy '" + args.strategy + "'");
  const SamplingPattern pattern = generate_pattern(
      args.num_lanes, args.grid_factor,
      args.strategy == "random" ? PatternStrategy::random : PatternStrategy::greedy_min_coherence,
      args.seed, args.lane_rate_hz);
  const std::string path = detail::output_path(args.out_path);
  save_pattern(pattern, path);
  const double coherence = pattern_coherence(build_sensing_matrix(pattern));
  log << "cosets:";
  for (int c : pattern.cosets) log << " " << c;
  log << "\ncoherence: " << coherence << "\n";
  log << "delay grid realizable on 250 ps steps: "
      << (check_hardware_delay_grid(pattern) ? "yes" : "no") << "\n";

  RunManifest manifest("pattern", args.seed);
  manifest.set_config("pattern.P", std::to_string(args.num_lanes));
  manifest.set_config("pattern.L", std::to_string(args.grid_factor));
  manifest.set_config("pattern.fs_hz", detail::format_double(args.lane_rate_hz));
  manifest.set_config("pattern.strategy", args.strategy);
  manifest.set_config("pattern.seed", std::to_string(args.seed));
  manifest.set_config("pattern.cosets", detail::join_ints(pattern.cosets));
  manifest.add_output(path);
  manifest.write(path + ".manifest.json");
  log << "wrote " << path << "\n";
  return kExitOk;
}

// --- dispatch ---------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& log = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"GHz-bandwidth compressed spectrum sensing simulator"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo detection-probability sweep");
  std::string config_path, from_manifest;
  simulate->add_option("--config", config_path, "key=value config file");
  simulate->add_option("--from-manifest", from_manifest, "re-run a previous run's manifest");
  std::optional<double> ov_snr;
  std::optional<int> ov_trials;
  std::optional<std::uint64_t> ov_seed;
  std::optional<std::string> ov_prefix, ov_occ;
  simulate->add_option("--snr-db", ov_snr, "override snr_db");
  simulate->add_option("--trials", ov_trials, "override trials per point");
  simulate->add_option("--seed", ov_seed, "override base seed");
  simulate->add_option("--out-prefix", ov_prefix, "override output prefix");
  simulate->add_option("--occupancy", ov_occ, "override occupancy list (MHz, comma separated)");

  // reconstruct
  auto* reconstruct = app.add_subcommand("reconstruct", "recover the spectrum of one snapshot");
  ReconstructArgs rec;
  reconstruct->add_option("--input", rec.input_path, "IQ or lane-block container")->required();
  reconstruct->add_option("--pattern", rec.pattern_path, "pattern file")->required();
  reconstruct->add_flag("--lane-block", rec.lane_block, "input holds per-lane samples");
  reconstruct->add_option("--d", rec.decimation, "decimation factor");
  reconstruct->add_option("--N", rec.window_len, "window length (default: whole snapshot)");
  reconstruct->add_option("--max-support", rec.recovery.max_support, "greedy iteration cap");
  reconstruct->add_option("--tol", rec.recovery.residual_tol, "relative residual tolerance");
  reconstruct->add_option("--gamma", rec.recovery.ed_threshold_factor, "energy detection factor");
  reconstruct->add_option("--out", rec.out_csv, "per-subband report CSV");

  // gensig
  auto* gensig = app.add_subcommand("gensig", "synthesize a sparse multiband IQ file");
  GensigArgs gen;
  gensig->add_option("--out", gen.out_path, "output IQ container");
  std::string gen_pattern_path;
  gensig->add_option("--pattern", gen_pattern_path, "pattern file (defaults P=8 L=40)");
  gensig->add_option("--P", gen.num_lanes, "lane count when no pattern file is given");
  gensig->add_option("--L", gen.grid_factor, "grid factor when no pattern file is given");
  double gen_fs_mhz = 50.0;
  gensig->add_option("--fs-mhz", gen_fs_mhz, "lane rate in MHz");
  gensig->add_option("--N", gen.window_len, "window length per lane");
  gensig->add_option("--band", gen.band_specs, "band as center_mhz:width_mhz (repeatable)");
  gensig->add_option("--occupancy", gen.occupancy_mhz, "auto-place transmissions (MHz)");
  gensig->add_option("--snr-db", gen.snr_db, "SNR in dB (default: noiseless)");
  gensig->add_option("--seed", gen.seed, "random seed");
  gensig->add_flag("--dump-lanes", gen.dump_lanes, "also write the extracted lane block");

  // equivalence
  auto* equivalence =
      app.add_subcommand("equivalence", "check the two acquisition models agree");
  EquivalenceArgs eq;
  equivalence->add_option("--trials", eq.trials, "number of random instances");
  equivalence->add_option("--N", eq.window_len, "window length");
  equivalence->add_option("--seed", eq.seed, "random seed");
  equivalence->add_option("--tolerance", eq.tolerance, "maximum relative error accepted");

  // pattern
  auto* pattern_cmd = app.add_subcommand("pattern", "generate and score a sampling pattern");
  PatternArgs pat;
  pattern_cmd->add_option("--P", pat.num_lanes, "lane count");
  pattern_cmd->add_option("--L", pat.grid_factor, "grid factor");
  pattern_cmd->add_option("--strategy", pat.strategy, "random | greedy_min_coherence");
  pattern_cmd->add_option("--seed", pat.seed, "random seed");
  double pat_fs_mhz = 50.0;
  pattern_cmd->add_option("--fs-mhz", pat_fs_mhz, "lane rate in MHz");
  pattern_cmd->add_option("--out", pat.out_path, "pattern file to write");

  std::vector<const char*> argv;
  static const std::string prog = "gbsense";
  argv.push_back(prog.c_str());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      log << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      ConfigFile cfg;
      if (!from_manifest.empty())
        cfg = RunManifest::reload_config(from_manifest);
      else if (!config_path.empty())
        cfg = ConfigFile::load(config_path);
      SimulateSettings s = resolve_simulate(cfg);
      if (ov_snr) s.snr_db = *ov_snr;
      if (ov_trials) s.trials = *ov_trials;
      if (ov_seed) s.seed = *ov_seed;
      if (ov_prefix) s.out_prefix = *ov_prefix;
      if (ov_occ) s.occupancies_mhz = detail::parse_double_list(*ov_occ);
      return cmd_simulate(s, log);
    }
    if (reconstruct->parsed()) return cmd_reconstruct(rec, log);
    if (gensig->parsed()) {
      if (!gen_pattern_path.empty()) gen.pattern_path = gen_pattern_path;
      gen.lane_rate_hz = gen_fs_mhz * 1e6;
      return cmd_gensig(gen, log);
    }
    if (equivalence->parsed()) return cmd_equivalence(eq, log);
    if (pattern_cmd->parsed()) {
      pat.lane_rate_hz = pat_fs_mhz * 1e6;
      return cmd_pattern(pat, log);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case errc::bad_magic:
      case errc::version_unsupported:
      case errc::truncated_file:
      case errc::io_failure:
        return kExitDataFormat;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace gbsense::cli
