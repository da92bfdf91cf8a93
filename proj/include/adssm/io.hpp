#pragma once

// File formats: band registry, sweep dataset (long CSV + grid JSON), raw IQ
// captures, metric and binned CSVs, fit reports and the parameter table.

#include <array>
#include <bit>
#include <charconv>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "adssm/binning.hpp"
#include "adssm/errors.hpp"
#include "adssm/fitting.hpp"
#include "adssm/metrics.hpp"
#include "adssm/spectrum_core.hpp"
#include "adssm/synth.hpp"

namespace adssm::io {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- helpers

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return {buf.data(), end};
}

inline std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw std::runtime_error("format_fixed failed");
  return {buf.data(), end};
}

inline double parse_double(std::string_view s, const std::string& context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InputError(context + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

inline std::size_t parse_size(std::string_view s, const std::string& context) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InputError(context + ": cannot parse integer '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

inline std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

inline json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

inline void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

/// Reads the header line and checks it matches `expected` exactly.
inline void expect_header(std::istream& in, std::string_view expected, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw InputError("'" + path.string() + "': expected header '" + std::string(expected) + "', got '" + line + "'");
}

template <typename T>
T json_get(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw InputError(context + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(context + ": field '" + key + "': " + e.what());
  }
}

template <typename T>
T json_opt(const json& j, const char* key, T fallback, const std::string& context) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return json_get<T>(j, key, context);
}

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ------------------------------------------------------------ band registry

inline std::vector<BandSpec> parse_band_registry(const json& j, const std::string& context) {
  if (!j.is_array()) throw InputError(context + ": band registry must be a JSON array");
  std::vector<BandSpec> out;
  for (const auto& e : j) {
    BandSpec b{json_get<std::string>(e, "name", context), json_get<double>(e, "f_low_hz", context),
               json_get<double>(e, "f_high_hz", context)};
    if (b.name.empty() || b.name.find_first_of(",\"\n") != std::string::npos)
      throw InputError(context + ": band names must be non-empty and free of commas, quotes and newlines");
    if (!(b.f_low_hz < b.f_high_hz)) throw InputError(context + ": band '" + b.name + "' has f_low_hz >= f_high_hz");
    out.push_back(std::move(b));
  }
  return out;
}

inline std::vector<BandSpec> read_band_registry(const fs::path& path) {
  return parse_band_registry(read_json(path), path.string());
}

inline json band_registry_json(const std::vector<BandSpec>& bands) {
  json j = json::array();
  for (const auto& b : bands) j.push_back({{"name", b.name}, {"f_low_hz", b.f_low_hz}, {"f_high_hz", b.f_high_hz}});
  return j;
}

inline void write_band_registry(const fs::path& path, const std::vector<BandSpec>& bands) {
  write_json(path, band_registry_json(bands));
}

// ------------------------------------------------------------ sweep dataset

inline constexpr std::string_view kSweepHeader = "timestamp_s,altitude_m,bin_index,psd_linear";

struct GridFile {
  FrequencyGrid grid;
  double gain_offset_db = 0.0;
};

inline void write_grid_json(const fs::path& path, const FrequencyGrid& grid, double gain_offset_db) {
  write_json(path, {{"f_start_hz", grid.first_bin_hz()},
                    {"bin_width_hz", grid.bin_width_hz()},
                    {"n_bins", grid.size()},
                    {"gain_offset_db", gain_offset_db}});
}

inline GridFile read_grid_json(const fs::path& path) {
  const auto j = read_json(path);
  const auto ctx = path.string();
  try {
    return {FrequencyGrid(json_get<double>(j, "f_start_hz", ctx), json_get<double>(j, "bin_width_hz", ctx),
                          json_get<std::size_t>(j, "n_bins", ctx)),
            json_opt<double>(j, "gain_offset_db", 0.0, ctx)};
  } catch (const ConfigError& e) {
    throw InputError(ctx + ": " + e.what());
  }
}

inline void write_sweep_csv(const fs::path& path, const std::vector<SweepRecord>& records) {
  auto out = open_out(path);
  out << kSweepHeader << '\n';
  std::string line;
  for (const auto& r : records) {
    const std::string prefix = format_double(r.timestamp_s) + ',' + format_double(r.altitude_m) + ',';
    for (std::size_t i = 0; i < r.psd.size(); ++i) {
      line = prefix;
      line += std::to_string(i);
      line += ',';
      line += format_double(r.psd[i]);
      line += '\n';
      out << line;
    }
  }
}

/// Rows are grouped into snapshots by consecutive (timestamp, altitude); every
/// snapshot must list each grid bin exactly once.
inline std::vector<SweepRecord> read_sweep_csv(const fs::path& path, const GridFile& grid) {
  auto in = open_in(path);
  expect_header(in, kSweepHeader, path);
  const auto ctx = path.string();
  std::vector<SweepRecord> records;
  std::vector<bool> seen;
  auto close_record = [&]() {
    if (records.empty()) return;
    for (bool s : seen)
      if (!s) throw InputError(ctx + ": snapshot at t=" + format_double(records.back().timestamp_s) + " is incomplete");
  };
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    const auto where = ctx + ":" + std::to_string(line_no);
    if (f.size() != 4) throw InputError(where + ": expected 4 fields");
    const double t = parse_double(f[0], where);
    const double h = parse_double(f[1], where);
    const std::size_t bin = parse_size(f[2], where);
    const double v = parse_double(f[3], where);
    if (records.empty() || records.back().timestamp_s != t || records.back().altitude_m != h) {
      close_record();
      SweepRecord r;
      r.timestamp_s = t;
      r.altitude_m = h;
      r.gain_offset_db = grid.gain_offset_db;
      r.psd.assign(grid.grid.size(), 0.0);
      records.push_back(std::move(r));
      seen.assign(grid.grid.size(), false);
    }
    if (bin >= grid.grid.size()) throw InputError(where + ": bin_index beyond grid");
    if (seen[bin]) throw InputError(where + ": duplicate bin_index in snapshot");
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(where + ": psd_linear must be finite and >= 0");
    seen[bin] = true;
    records.back().psd[bin] = v;
  }
  close_record();
  return records;
}

// --------------------------------------------------------------- raw capture

struct RawCapture {
  std::vector<std::complex<double>> iq;
  double fs_hz = 0.0;
  double center_freq_hz = 0.0;
};

inline fs::path raw_sidecar_path(const fs::path& bin_path) {
  auto p = bin_path;
  p += ".json";
  return p;
}

namespace detail {
inline std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}
}  // namespace detail

/// Interleaved little-endian float32 I/Q with a {fs_hz, center_freq_hz} sidecar.
inline void write_raw_capture(const fs::path& bin_path, const RawCapture& cap) {
  auto out = open_out(bin_path, std::ios::binary);
  for (const auto& s : cap.iq) {
    for (float f : {static_cast<float>(s.real()), static_cast<float>(s.imag())}) {
      const auto bits = detail::to_le(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  write_json(raw_sidecar_path(bin_path), {{"fs_hz", cap.fs_hz}, {"center_freq_hz", cap.center_freq_hz}});
}

inline RawCapture read_raw_capture(const fs::path& bin_path) {
  const auto side = read_json(raw_sidecar_path(bin_path));
  RawCapture cap;
  cap.fs_hz = json_get<double>(side, "fs_hz", raw_sidecar_path(bin_path).string());
  cap.center_freq_hz = json_get<double>(side, "center_freq_hz", raw_sidecar_path(bin_path).string());
  auto in = open_in(bin_path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) throw InputError("'" + bin_path.string() + "': size is not a whole number of I/Q pairs");
  cap.iq.resize(bytes.size() / 8);
  for (std::size_t i = 0; i < cap.iq.size(); ++i) {
    std::uint32_t re = 0, im = 0;
    std::memcpy(&re, bytes.data() + 8 * i, 4);
    std::memcpy(&im, bytes.data() + 8 * i + 4, 4);
    cap.iq[i] = {std::bit_cast<float>(detail::to_le(re)), std::bit_cast<float>(detail::to_le(im))};
  }
  return cap;
}

// ------------------------------------------------------------ metric rows

inline constexpr std::string_view kMetricHeader =
    "timestamp_s,altitude_m,band,power_db,entropy_bits,entropy_norm,sparsity";

inline void write_metric_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  auto out = open_out(path);
  out << kMetricHeader << '\n';
  for (const auto& r : rows) {
    const auto& s = r.sample;
    out << format_double(s.timestamp_s) << ',' << format_double(s.altitude_m) << ',' << r.band << ','
        << format_double(s.power_db) << ',' << format_double(s.entropy_bits) << ',' << format_double(s.entropy_norm)
        << ',' << format_double(s.sparsity) << '\n';
  }
}

inline std::vector<MetricRow> read_metric_csv(const fs::path& path) {
  auto in = open_in(path);
  expect_header(in, kMetricHeader, path);
  std::vector<MetricRow> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    const auto f = split_csv(line);
    if (f.size() != 7) throw InputError(where + ": expected 7 fields");
    MetricRow r;
    r.sample.timestamp_s = parse_double(f[0], where);
    r.sample.altitude_m = parse_double(f[1], where);
    r.band = std::string(f[2]);
    r.sample.power_db = parse_double(f[3], where);
    r.sample.entropy_bits = parse_double(f[4], where);
    r.sample.entropy_norm = parse_double(f[5], where);
    r.sample.sparsity = parse_double(f[6], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ------------------------------------------------------------ binned series

inline constexpr std::string_view kBinnedHeader = "band,metric,center_m,mean,std,count";

inline void write_binned_csv(const fs::path& path, const std::vector<BinnedMetricSeries>& all) {
  auto out = open_out(path);
  out << kBinnedHeader << '\n';
  for (const auto& s : all)
    for (const auto& b : s.bins)
      out << s.band << ',' << to_string(s.metric) << ',' << format_double(b.center_m) << ',' << format_double(b.mean)
          << ',' << format_double(b.std) << ',' << b.count << '\n';
}

/// Series come back in first-appearance order of (band, metric).
inline std::vector<BinnedMetricSeries> read_binned_csv(const fs::path& path) {
  auto in = open_in(path);
  expect_header(in, kBinnedHeader, path);
  std::vector<BinnedMetricSeries> out;
  std::map<std::pair<std::string, Metric>, std::size_t> index;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    const auto f = split_csv(line);
    if (f.size() != 6) throw InputError(where + ": expected 6 fields");
    const std::string band(f[0]);
    const Metric metric = parse_metric(std::string(f[1]));
    auto [it, inserted] = index.try_emplace({band, metric}, out.size());
    if (inserted) {
      out.emplace_back();
      out.back().band = band;
      out.back().metric = metric;
    }
    auto& s = out[it->second];
    AltitudeBin b{parse_double(f[2], where), parse_double(f[3], where), parse_double(f[4], where),
                  parse_size(f[5], where)};
    if (!s.bins.empty() && !(b.center_m > s.bins.back().center_m))
      throw InputError(where + ": centers must be strictly increasing within a series");
    s.bins.push_back(b);
  }
  for (auto& s : out) s.delta_h = s.bins.size() > 1 ? s.bins[1].center_m - s.bins[0].center_m : 0.0;
  return out;
}

// -------------------------------------------------------------- fit reports

inline json options_json(const FitOptions& o) {
  return {{"max_iters", o.max_iters}, {"x_tol", o.x_tol}, {"f_tol", o.f_tol}, {"restarts", o.restarts}, {"seed", o.seed}};
}

inline FitOptions parse_fit_options(const json& j, const std::string& ctx, FitOptions o = {}) {
  o.max_iters = json_opt<std::size_t>(j, "max_iters", o.max_iters, ctx);
  o.x_tol = json_opt<double>(j, "x_tol", o.x_tol, ctx);
  o.f_tol = json_opt<double>(j, "f_tol", o.f_tol, ctx);
  o.restarts = json_opt<std::size_t>(j, "restarts", o.restarts, ctx);
  o.seed = json_opt<std::uint64_t>(j, "seed", o.seed, ctx);
  try {
    o.validate();
  } catch (const ConfigError& e) {
    throw InputError(ctx + ": " + e.what());
  }
  return o;
}

inline json exp_params_json(const ExpModelParams& p) { return {{"x_inf", p.x_inf}, {"x_zero", p.x_zero}, {"tau", p.tau}}; }
inline json logistic_params_json(const LogisticModelParams& p) { return {{"k", p.k}, {"h_s", p.h_s}}; }

inline ExpModelParams parse_exp_params(const json& j, const std::string& ctx) {
  return {json_get<double>(j, "x_inf", ctx), json_get<double>(j, "x_zero", ctx), json_get<double>(j, "tau", ctx)};
}
inline LogisticModelParams parse_logistic_params(const json& j, const std::string& ctx) {
  return {json_get<double>(j, "k", ctx), json_get<double>(j, "h_s", ctx)};
}

inline json fit_report_json(const FitReport& r) {
  json j;
  j["band"] = r.band;
  j["metric"] = to_string(r.metric);
  j["model"] = to_string(r.model);
  if (const auto* e = std::get_if<ExpModelParams>(&r.params)) j["params"] = exp_params_json(*e);
  else j["params"] = logistic_params_json(std::get<LogisticModelParams>(r.params));
  j["rmse"] = r.rmse;
  j["r2"] = nullable(r.r2);
  j["h10_m"] = nullable(r.transitions ? std::optional(r.transitions->h10) : std::nullopt);
  j["h50_m"] = nullable(r.transitions ? std::optional(r.transitions->h50) : std::nullopt);
  j["h90_m"] = nullable(r.transitions ? std::optional(r.transitions->h90) : std::nullopt);
  j["q"] = r.q;
  j["n_bins"] = r.n_bins;
  j["objective"] = r.objective;
  j["band_bins"] = r.band_bins ? json(*r.band_bins) : json(nullptr);
  j["flags"] = r.flags;
  j["options"] = options_json(r.options);
  return j;
}

inline FitReport parse_fit_report(const json& j, const std::string& ctx) {
  FitReport r;
  r.band = json_get<std::string>(j, "band", ctx);
  r.metric = parse_metric(json_get<std::string>(j, "metric", ctx));
  r.model = parse_model_kind(json_get<std::string>(j, "model", ctx));
  if (r.model == ModelKind::logistic) r.params = parse_logistic_params(j.at("params"), ctx);
  else r.params = parse_exp_params(j.at("params"), ctx);
  r.rmse = json_get<double>(j, "rmse", ctx);
  if (j.contains("r2") && !j["r2"].is_null()) r.r2 = j["r2"].get<double>();
  if (j.contains("h50_m") && !j["h50_m"].is_null())
    r.transitions = TransitionHeights{j["h10_m"].get<double>(), j["h50_m"].get<double>(), j["h90_m"].get<double>()};
  if (j.contains("q")) r.q = j["q"].get<TransitionFractions>();
  r.n_bins = json_get<std::size_t>(j, "n_bins", ctx);
  r.objective = json_opt<double>(j, "objective", 0.0, ctx);
  if (j.contains("band_bins") && !j["band_bins"].is_null()) r.band_bins = j["band_bins"].get<std::size_t>();
  if (j.contains("flags")) r.flags = j["flags"].get<std::vector<std::string>>();
  if (j.contains("options")) r.options = parse_fit_options(j["options"], ctx);
  return r;
}

// -------------------------------------------------------- parameter table

inline constexpr std::string_view kTableHeader =
    "band,P_inf_db,P0_db,H_inf_bits,H0_bits,S_inf,S0,rmse_p_db,rmse_h_bits,rmse_s,r2_p";

/// One row of the per-band parameter table. Entropy columns are in bits
/// (normalized values times log2 of the band's bin count). For the logistic
/// sparsity model S_inf is 1 and S0 is the curve at ground level. Fields
/// without a fitted source are left empty.
inline std::string render_table_row(const std::string& band, const FitReport* power, const FitReport* entropy,
                                    const FitReport* sparsity_fit) {
  auto f2 = [](std::optional<double> v) { return v ? format_fixed(*v, 2) : std::string(); };
  std::optional<double> p_inf, p0, h_inf, h0, s_inf, s0, rmse_p, rmse_h, rmse_s, r2_p;
  if (power) {
    const auto& p = power->exp_params();
    p_inf = p.x_inf;
    p0 = p.x_zero;
    rmse_p = power->rmse;
    r2_p = power->r2;
  }
  if (entropy && entropy->band_bins && *entropy->band_bins > 1) {
    const double bits = std::log2(static_cast<double>(*entropy->band_bins));
    const auto& p = entropy->exp_params();
    h_inf = p.x_inf * bits;
    h0 = p.x_zero * bits;
    rmse_h = entropy->rmse * bits;
  }
  if (sparsity_fit) {
    s_inf = 1.0;
    s0 = logistic_eval(sparsity_fit->logistic_params(), 0.0);
    rmse_s = sparsity_fit->rmse;
  }
  std::string row = band;
  for (const auto& v : {p_inf, p0, h_inf, h0, s_inf, s0, rmse_p, rmse_h, rmse_s, r2_p}) {
    row += ',';
    row += f2(v);
  }
  return row;
}

// ------------------------------------------------------------- scenarios

inline ScenarioSpec parse_scenario(const json& j, const std::string& ctx) {
  ScenarioSpec spec;
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    auto& c = spec.sweep;
    c.f_start_hz = json_opt<double>(s, "f_start_hz", c.f_start_hz, ctx);
    c.f_stop_hz = json_opt<double>(s, "f_stop_hz", c.f_stop_hz, ctx);
    c.step_hz = json_opt<double>(s, "step_hz", c.step_hz, ctx);
    c.sample_rate_hz = json_opt<double>(s, "sample_rate_hz", c.sample_rate_hz, ctx);
    c.fft_size = json_opt<std::size_t>(s, "fft_size", c.fft_size, ctx);
    c.edge_trim = json_opt<std::size_t>(s, "edge_trim", c.edge_trim, ctx);
    c.samples_per_capture = json_opt<std::size_t>(s, "samples_per_capture", c.samples_per_capture, ctx);
  }
  spec.gain_offset_db = json_opt<double>(j, "gain_offset_db", spec.gain_offset_db, ctx);
  spec.background_noise_db = json_opt<double>(j, "background_noise_db", spec.background_noise_db, ctx);
  spec.noise_averages = json_opt<double>(j, "noise_averages", spec.noise_averages, ctx);
  spec.seed = json_opt<std::uint64_t>(j, "seed", spec.seed, ctx);

  if (!j.contains("trajectory")) throw InputError(ctx + ": missing field 'trajectory'");
  const auto& tr = j["trajectory"];
  if (tr.is_array()) {
    for (const auto& p : tr) {
      if (!p.is_array() || p.size() != 2) throw InputError(ctx + ": trajectory points must be [timestamp_s, altitude_m]");
      spec.trajectory.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  } else {
    AscentProfile a;
    a.h_max_m = json_get<double>(tr, "h_max_m", ctx);
    a.rate_mps = json_get<double>(tr, "rate_mps", ctx);
    a.dwell_s = json_opt<double>(tr, "dwell_s", 0.0, ctx);
    a.interval_s = json_opt<double>(tr, "interval_s", a.interval_s, ctx);
    a.descend = json_opt<bool>(tr, "descend", false, ctx);
    try {
      spec.trajectory = a.sample();
    } catch (const ConfigError& e) {
      throw InputError(ctx + ": " + e.what());
    }
  }

  if (!j.contains("bands") || !j["bands"].is_array()) throw InputError(ctx + ": missing array 'bands'");
  for (const auto& b : j["bands"]) {
    BandScenario bs;
    bs.band = parse_band_registry(json::array({b}), ctx).front();
    if (b.contains("power")) bs.power = parse_exp_params(b["power"], ctx + " band " + bs.band.name + " power");
    if (b.contains("entropy")) bs.entropy = parse_exp_params(b["entropy"], ctx + " band " + bs.band.name + " entropy");
    if (b.contains("sparsity"))
      bs.sparsity = parse_logistic_params(b["sparsity"], ctx + " band " + bs.band.name + " sparsity");
    bs.noise_floor_db = json_opt<double>(b, "noise_floor_db", spec.background_noise_db, ctx);
    for (const auto& e : b.value("emitters", json::array())) {
      EmitterSpec em;
      if (e.contains("bins")) em.bins = e["bins"].get<std::vector<std::size_t>>();
      if (e.contains("bin_range")) {
        const auto r = e["bin_range"].get<std::array<std::size_t, 2>>();
        for (std::size_t i = r[0]; i < r[1]; ++i) em.bins.push_back(i);
      }
      if (e.contains("peak_power_db")) em.peak_power_db = e["peak_power_db"].get<double>();
      em.activation_h50_m = json_opt<double>(e, "activation_h50_m", 0.0, ctx);
      em.activation_k = json_opt<double>(e, "activation_k", 1.0, ctx);
      em.always_on = json_opt<bool>(e, "always_on", false, ctx);
      em.jitter_db = json_opt<double>(e, "jitter_db", 0.0, ctx);
      bs.emitters.push_back(std::move(em));
    }
    spec.bands.push_back(std::move(bs));
  }
  return spec;
}

inline ScenarioSpec read_scenario(const fs::path& path) { return parse_scenario(read_json(path), path.string()); }

inline json ground_truth_json(const GroundTruth& t) {
  json bands = json::object();
  for (const auto& b : t.bands) {
    json jb;
    jb["n_bins"] = b.n_bins;
    jb["power"] = exp_params_json(b.power);
    jb["entropy_norm"] = exp_params_json(b.entropy);
    jb["sparsity"] = logistic_params_json(b.sparsity);
    jb["noise_floor_db"] = b.noise_floor_db;
    jb["emitters"] = b.emitters;
    jb["occupied_fraction"] = b.occupied_fraction;
    jb["weighted_median_activation_h50_m"] = nullable(b.weighted_median_activation_h50_m);
    bands[b.name] = jb;
  }
  return {{"seed", t.seed},
          {"seed_override", t.seed_override},
          {"noise_model",
           {{"kind", "averaged exponential periodogram"},
            {"noise_averages", t.noise_averages},
            {"background_noise_db", t.background_noise_db}}},
          {"gain_offset_db", t.gain_offset_db},
          {"bands", bands}};
}

}  // namespace adssm::io
