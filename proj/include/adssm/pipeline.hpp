#pragma once

// End-to-end stages. Each stage has an in-memory form and a file-to-file
// command; commands communicate only through the documented files, so any
// stage can be re-run on its own.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adssm/binning.hpp"
#include "adssm/errors.hpp"
#include "adssm/fitting.hpp"
#include "adssm/io.hpp"
#include "adssm/metrics.hpp"
#include "adssm/model.hpp"
#include "adssm/spectrum_core.hpp"
#include "adssm/synth.hpp"
#include "adssm/welch.hpp"

namespace adssm {

namespace fs = std::filesystem;
using nlohmann::json;

/// Entropy series whose relative range falls below this are fitted with the
/// reduced (fixed altitude constant) model.
inline constexpr double kEntropyFlatness = 0.02;

struct PipelineConfig {
  std::optional<fs::path> scenario;
  std::optional<std::uint64_t> seed;
  fs::path sweeps;
  std::optional<fs::path> grid;
  fs::path bands;
  fs::path out_dir;
  BinningOptions binning;
  ThresholdSpec threshold;
  FitOptions fit;
  TransitionFractions q = kDefaultTransitionFractions;
};

/// Defaults and modelling assumptions echoed into every stage's metadata.
inline json assumptions_json() {
  return {
      {"entropy_eps", kEntropyEps},
      {"entropy_eps_kind", "absolute, linear power units"},
      {"welch", {{"window", "hann"}, {"overlap_fraction", 0.5}, {"scaling", "density"}, {"detrend", "none"}}},
      {"percentile_convention", "linear interpolation between order statistics at rank p/100*(n-1), dB domain"},
      {"threshold_comparison", "strict: 10*log10(P) > gamma"},
      {"threshold_scope", "per band per campaign, fixed across altitude"},
      {"binning_intervals", "[k*dh, (k+1)*dh), origin at ground, population std"},
      {"power_sentinel", "all-zero band power is -inf and excluded from binning"},
      {"entropy_fit_units", "normalized; table converts to bits by log2(n_bins)"},
      {"entropy_reduced_flatness", kEntropyFlatness},
      {"transition_reference", "model value at h = 0"},
      {"r2_scope", "computed for every metric; the table reports power only"},
  };
}

// ------------------------------------------------------------------ metrics

struct MetricsResult {
  std::vector<MetricRow> rows;
  std::vector<BandDefinition> bands;
  std::map<std::string, double> noise_floor_db;
  std::map<std::string, double> threshold_db;
  std::vector<std::string> warnings;
};

/// Two passes: pool every in-band sample of the campaign to fix each band's
/// threshold, then evaluate all three metrics per snapshot and band.
inline MetricsResult compute_campaign_metrics(const std::vector<SweepRecord>& records, const FrequencyGrid& grid,
                                              const std::vector<BandSpec>& registry, const ThresholdSpec& threshold) {
  threshold.validate();
  MetricsResult out;
  for (const auto& spec : registry) {
    try {
      out.bands.push_back(resolve_band(grid, spec));
    } catch (const BandRangeError& e) {
      out.warnings.push_back(std::string(e.what()) + "; band skipped");
    }
  }
  for (const auto& r : records) r.validate(grid);
  if (records.empty()) return out;

  std::vector<double> pool;
  for (const auto& band : out.bands) {
    pool.clear();
    pool.reserve(band.n_bins * records.size());
    for (const auto& r : records) {
      const auto v = extract_band_psd(r, band);
      pool.insert(pool.end(), v.begin(), v.end());
    }
    const double nf = noise_floor(pool, threshold);
    out.noise_floor_db[band.name] = nf;
    out.threshold_db[band.name] = nf + threshold.margin_db;
  }

  for (const auto& r : records) {
    for (const auto& band : out.bands) {
      const auto v = extract_band_psd(r, band);
      MetricRow row;
      row.band = band.name;
      row.sample = compute_metrics(v, out.threshold_db[band.name]);
      row.sample.timestamp_s = r.timestamp_s;
      row.sample.altitude_m = r.altitude_m;
      if (std::isinf(row.sample.power_db)) out.warnings.push_back("band '" + band.name + "' has zero power at t=" +
                                                                  io::format_double(r.timestamp_s) + "; row flagged");
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

// ------------------------------------------------------------------ binning

struct BinningResult {
  std::vector<BinnedMetricSeries> series;
  std::vector<std::string> warnings;
};

inline BinningResult bin_metric_rows(const std::vector<MetricRow>& rows, const BinningOptions& opts) {
  std::vector<std::string> order;
  std::map<std::string, std::array<std::vector<AltitudeSample>, 3>> samples;
  for (const auto& r : rows) {
    auto [it, inserted] = samples.try_emplace(r.band);
    if (inserted) order.push_back(r.band);
    it->second[0].push_back({r.sample.altitude_m, r.sample.power_db});
    it->second[1].push_back({r.sample.altitude_m, r.sample.entropy_norm});
    it->second[2].push_back({r.sample.altitude_m, r.sample.sparsity});
  }
  BinningResult out;
  constexpr std::array<Metric, 3> metrics{Metric::power, Metric::entropy_norm, Metric::sparsity};
  for (const auto& band : order) {
    for (std::size_t m = 0; m < 3; ++m) {
      try {
        auto s = bin_by_altitude(samples[band][m], opts);
        s.band = band;
        s.metric = metrics[m];
        out.series.push_back(std::move(s));
      } catch (const InsufficientDataError& e) {
        out.warnings.push_back(band + "/" + to_string(metrics[m]) + ": " + e.what());
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------ fitting

struct FitOutcome {
  std::string band;
  Metric metric = Metric::power;
  std::optional<FitReport> report;
  std::string note;
};

inline bool entropy_is_flat(const BinnedMetricSeries& s) {
  const auto m = s.means();
  if (m.empty()) return true;
  const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(m.size());
  return (*hi - *lo) < kEntropyFlatness * std::abs(mean);
}

/// Exponential for power, exponential (or reduced when flat) for normalized
/// entropy, logistic for sparsity. Series that cannot be fitted are reported
/// with a note instead of a report.
inline FitOutcome fit_series(const BinnedMetricSeries& s, const FitOptions& opts, const TransitionFractions& q,
                             std::optional<std::size_t> band_bins = std::nullopt) {
  FitOutcome out{s.band, s.metric, std::nullopt, {}};
  try {
    switch (s.metric) {
      case Metric::power: out.report = fit_exp(s, opts, q); break;
      case Metric::entropy_norm:
        if (entropy_is_flat(s)) {
          out.report = fit_exp_reduced(s, std::nullopt, opts, q);
          out.report->flags.insert(out.report->flags.begin(), "entropy nearly flat: reduced model fitted");
        } else {
          out.report = fit_exp(s, opts, q);
        }
        break;
      case Metric::sparsity: out.report = fit_logistic(s, opts, q); break;
    }
    out.report->band_bins = band_bins;
  } catch (const InsufficientDataError& e) {
    out.note = e.what();
  } catch (const FitError& e) {
    out.note = e.what();
  }
  return out;
}

inline std::string file_slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

// ----------------------------------------------------------------- commands

inline void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

struct SimulateOutputs {
  fs::path sweeps, grid, bands, truth;
};

inline SimulateOutputs cmd_simulate(const fs::path& scenario_path, const fs::path& out_dir,
                                    std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!fs::exists(scenario_path)) throw InputError("scenario file not found: '" + scenario_path.string() + "'");
  auto spec = io::read_scenario(scenario_path);
  if (seed_override) spec.seed = *seed_override;
  SyntheticDataset ds;
  try {
    ds = gen_sweep_dataset(spec);
  } catch (const BandRangeError& e) {
    throw InputError(scenario_path.string() + ": " + e.what());
  }
  ds.truth.seed_override = seed_override.has_value();

  SimulateOutputs out{out_dir / "sweeps.csv", out_dir / "grid.json", out_dir / "bands.json", out_dir / "truth.json"};
  fs::create_directories(out_dir);
  io::write_sweep_csv(out.sweeps, ds.records);
  io::write_grid_json(out.grid, ds.grid, spec.gain_offset_db);
  std::vector<BandSpec> registry;
  for (const auto& b : spec.bands) registry.push_back(b.band);
  io::write_band_registry(out.bands, registry);
  auto truth = io::ground_truth_json(ds.truth);
  truth["snapshots"] = ds.records.size();
  truth["grid_bins"] = ds.grid.size();
  io::write_json(out.truth, truth);
  return out;
}

inline fs::path default_grid_path(const fs::path& sweeps) {
  return sweeps.has_parent_path() ? sweeps.parent_path() / "grid.json" : fs::path("grid.json");
}

inline fs::path cmd_metrics(const fs::path& sweeps, const fs::path& bands, const fs::path& out_dir,
                            const ThresholdSpec& threshold = {}, std::optional<fs::path> grid_path = std::nullopt) {
  try {
    threshold.validate();
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const auto grid = io::read_grid_json(grid_path.value_or(default_grid_path(sweeps)));
  const auto registry = io::read_band_registry(bands);
  const auto records = io::read_sweep_csv(sweeps, grid);
  if (records.empty()) throw InputError("'" + sweeps.string() + "' contains no snapshots");
  auto result = compute_campaign_metrics(records, grid.grid, registry, threshold);
  print_warnings(result.warnings);

  fs::create_directories(out_dir);
  const auto out = out_dir / "metrics.csv";
  io::write_metric_csv(out, result.rows);
  json meta;
  meta["stage"] = "metrics";
  meta["assumptions"] = assumptions_json();
  meta["threshold"] = {{"percentile", threshold.percentile}, {"margin_db", threshold.margin_db}};
  meta["snapshots"] = records.size();
  meta["gain_offset_db"] = grid.gain_offset_db;
  json jb = json::object();
  for (const auto& b : result.bands)
    jb[b.name] = {{"n_bins", b.n_bins},
                  {"first_bin", b.first_bin},
                  {"noise_floor_db", result.noise_floor_db[b.name]},
                  {"threshold_db", result.threshold_db[b.name]}};
  meta["bands"] = jb;
  meta["warnings"] = result.warnings;
  io::write_json(out_dir / "metrics.meta.json", meta);
  return out;
}

inline std::map<std::string, std::size_t> read_band_sizes(const fs::path& meta_path) {
  std::map<std::string, std::size_t> out;
  if (!fs::exists(meta_path)) return out;
  const auto meta = io::read_json(meta_path);
  if (!meta.contains("bands")) return out;
  for (const auto& [name, b] : meta["bands"].items())
    if (b.contains("n_bins")) out[name] = b["n_bins"].get<std::size_t>();
  return out;
}

inline fs::path cmd_bin(const fs::path& metrics_path, const fs::path& out_dir, const BinningOptions& opts = {}) {
  if (!(opts.delta_h > 0.0)) throw InputError("--delta-h must be > 0");
  const auto rows = io::read_metric_csv(metrics_path);
  if (rows.empty()) throw InputError("'" + metrics_path.string() + "' contains no metric rows");
  auto result = bin_metric_rows(rows, opts);
  print_warnings(result.warnings);
  if (result.series.empty()) throw InputError("no altitude bin reached min_count in any series");

  fs::create_directories(out_dir);
  const auto out = out_dir / "binned.csv";
  io::write_binned_csv(out, result.series);
  json meta;
  meta["stage"] = "bin";
  meta["assumptions"] = assumptions_json();
  meta["delta_h"] = opts.delta_h;
  meta["min_count"] = opts.min_count;
  json jb = json::object();
  for (const auto& [name, n] : read_band_sizes(metrics_path.parent_path() / "metrics.meta.json"))
    jb[name] = {{"n_bins", n}};
  meta["bands"] = jb;
  meta["warnings"] = result.warnings;
  io::write_json(out_dir / "binned.meta.json", meta);
  return out;
}

struct FitCommandResult {
  std::vector<FitOutcome> outcomes;
  fs::path table;
};

inline FitCommandResult cmd_fit(const fs::path& binned_path, const fs::path& out_dir, const FitOptions& opts = {},
                                const TransitionFractions& q = kDefaultTransitionFractions) {
  try {
    opts.validate();
    validate_fractions(q);
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const auto series = io::read_binned_csv(binned_path);
  if (series.empty()) throw InputError("'" + binned_path.string() + "' contains no binned series");
  const auto sizes = read_band_sizes(binned_path.parent_path() / "binned.meta.json");

  FitCommandResult result;
  for (const auto& s : series) {
    std::optional<std::size_t> n;
    if (auto it = sizes.find(s.band); it != sizes.end()) n = it->second;
    result.outcomes.push_back(fit_series(s, opts, q, n));
  }

  fs::create_directories(out_dir / "fits");
  std::vector<std::string> band_order;
  for (const auto& o : result.outcomes)
    if (std::find(band_order.begin(), band_order.end(), o.band) == band_order.end()) band_order.push_back(o.band);

  auto summary = io::open_out(out_dir / "summary.csv");
  summary << "band,metric,status,model,rmse,r2,h10_m,h50_m,h90_m,n_bins,note\n";
  auto curves = io::open_out(out_dir / "plot_curves.csv");
  curves << "band,metric,altitude_m,value\n";
  auto trans = io::open_out(out_dir / "plot_transitions.csv");
  trans << "band,metric,h10_m,h50_m,h90_m\n";
  auto opt_str = [](std::optional<double> v) { return v ? io::format_double(*v) : std::string(); };

  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const auto& o = result.outcomes[i];
    const auto& s = series[i];
    const std::string metric = to_string(o.metric);
    if (!o.report) {
      summary << o.band << ',' << metric << ",not fitted,,,,,,," << s.bins.size() << ',' << o.note << '\n';
      continue;
    }
    const auto& r = *o.report;
    io::write_json(out_dir / "fits" / (file_slug(o.band) + "__" + metric + ".json"), io::fit_report_json(r));
    const auto t = r.transitions;
    std::string note;
    for (const auto& f : r.flags) note += (note.empty() ? "" : "; ") + f;
    std::replace(note.begin(), note.end(), ',', ';');
    summary << o.band << ',' << metric << ",fitted," << to_string(r.model) << ',' << io::format_double(r.rmse) << ','
            << opt_str(r.r2) << ',' << opt_str(t ? std::optional(t->h10) : std::nullopt) << ','
            << opt_str(t ? std::optional(t->h50) : std::nullopt) << ','
            << opt_str(t ? std::optional(t->h90) : std::nullopt) << ',' << r.n_bins << ',' << note << '\n';
    if (t)
      trans << o.band << ',' << metric << ',' << io::format_double(t->h10) << ',' << io::format_double(t->h50) << ','
            << io::format_double(t->h90) << '\n';
    const double top = std::ceil(s.bins.back().center_m + 0.5 * s.delta_h);
    for (double h = 0.0; h <= top; h += 1.0)
      curves << o.band << ',' << metric << ',' << io::format_double(h) << ',' << io::format_double(r.eval(h)) << '\n';
  }
  io::write_binned_csv(out_dir / "plot_bins.csv", series);

  result.table = out_dir / "table.csv";
  auto table = io::open_out(result.table);
  table << io::kTableHeader << '\n';
  for (const auto& band : band_order) {
    const FitReport* p = nullptr;
    const FitReport* e = nullptr;
    const FitReport* sp = nullptr;
    for (const auto& o : result.outcomes) {
      if (o.band != band || !o.report) continue;
      if (o.metric == Metric::power) p = &*o.report;
      if (o.metric == Metric::entropy_norm) e = &*o.report;
      if (o.metric == Metric::sparsity) sp = &*o.report;
    }
    table << io::render_table_row(band, p, e, sp) << '\n';
  }

  json meta;
  meta["stage"] = "fit";
  meta["assumptions"] = assumptions_json();
  meta["options"] = io::options_json(opts);
  meta["q"] = q;
  meta["extensions"] = {"r2 for entropy and sparsity", "transition heights for every metric"};
  io::write_json(out_dir / "fit.meta.json", meta);
  return result;
}

inline fs::path cmd_psd(const fs::path& capture_path, const fs::path& out_dir, const WelchConfig& cfg = {}) {
  const auto cap = io::read_raw_capture(capture_path);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const auto psd = welch_psd(cap.iq, cap.fs_hz, cfg);
  fs::create_directories(out_dir);
  const auto out = out_dir / "psd.csv";
  auto f = io::open_out(out);
  f << "freq_hz,psd_linear\n";
  const double bw = cap.fs_hz / static_cast<double>(cfg.fft_size);
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double freq =
        cap.center_freq_hz + (static_cast<double>(k) - static_cast<double>(cfg.fft_size / 2)) * bw;
    f << io::format_double(freq) << ',' << io::format_double(psd[k]) << '\n';
  }
  io::write_json(out_dir / "psd.meta.json",
                 {{"stage", "psd"},
                  {"fs_hz", cap.fs_hz},
                  {"center_freq_hz", cap.center_freq_hz},
                  {"samples", cap.iq.size()},
                  {"segments", welch_segment_count(cap.iq.size(), cfg)},
                  {"fft_size", cfg.fft_size},
                  {"overlap_fraction", cfg.overlap_fraction},
                  {"window", to_string(cfg.window)},
                  {"scaling", to_string(cfg.scaling)},
                  {"detrend", "none"}});
  return out;
}

inline PipelineConfig read_pipeline_config(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("config file not found: '" + path.string() + "'");
  const auto j = io::read_json(path);
  const auto ctx = path.string();
  const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  PipelineConfig c;
  if (j.contains("scenario")) c.scenario = resolve(j["scenario"].get<std::string>());
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (!c.scenario) {
    c.sweeps = resolve(io::json_get<std::string>(j, "sweeps", ctx));
    c.bands = resolve(io::json_get<std::string>(j, "bands", ctx));
  } else {
    if (j.contains("sweeps")) c.sweeps = resolve(j["sweeps"].get<std::string>());
    if (j.contains("bands")) c.bands = resolve(j["bands"].get<std::string>());
  }
  if (j.contains("grid")) c.grid = resolve(j["grid"].get<std::string>());
  c.out_dir = resolve(io::json_get<std::string>(j, "out_dir", ctx));
  c.binning.delta_h = io::json_opt<double>(j, "delta_h", c.binning.delta_h, ctx);
  c.binning.min_count = io::json_opt<std::size_t>(j, "min_count", c.binning.min_count, ctx);
  if (j.contains("threshold")) {
    c.threshold.percentile = io::json_opt<double>(j["threshold"], "percentile", c.threshold.percentile, ctx);
    c.threshold.margin_db = io::json_opt<double>(j["threshold"], "margin_db", c.threshold.margin_db, ctx);
  }
  if (j.contains("fit")) c.fit = io::parse_fit_options(j["fit"], ctx);
  if (j.contains("transitions_q")) c.q = io::json_get<TransitionFractions>(j, "transitions_q", ctx);
  return c;
}

/// simulate (when a scenario is configured) -> metrics -> bin -> fit.
inline FitCommandResult cmd_run_all(const PipelineConfig& c) {
  fs::path sweeps = c.sweeps;
  fs::path bands = c.bands;
  std::optional<fs::path> grid = c.grid;
  if (c.scenario) {
    const auto sim = cmd_simulate(*c.scenario, c.out_dir / "simulate", c.seed);
    if (sweeps.empty()) {
      sweeps = sim.sweeps;
      grid = sim.grid;
    }
    if (bands.empty()) bands = sim.bands;
  }
  const auto metrics = cmd_metrics(sweeps, bands, c.out_dir / "metrics", c.threshold, grid);
  const auto binned = cmd_bin(metrics, c.out_dir / "binned", c.binning);
  return cmd_fit(binned, c.out_dir / "fit", c.fit, c.q);
}

}  // namespace adssm
