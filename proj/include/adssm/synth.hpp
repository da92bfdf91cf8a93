#pragma once

// Synthetic ground truth at two fidelity levels: metric curves with planted
// model parameters, and full PSD sweeps from an emitter/clutter scenario.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "adssm/binning.hpp"
#include "adssm/errors.hpp"
#include "adssm/model.hpp"
#include "adssm/random.hpp"
#include "adssm/spectrum_core.hpp"
#include "adssm/welch.hpp"

namespace adssm {

/// Model evaluated at each center plus N(0, noise_sigma) per bin. Logistic
/// series are clipped to [0, 1] since they stand for occupancy fractions.
inline BinnedMetricSeries gen_metric_series(const std::variant<ExpModelParams, LogisticModelParams>& model,
                                            const std::vector<double>& centers, double noise_sigma,
                                            std::uint64_t seed, std::size_t nominal_count = 10) {
  if (!(noise_sigma >= 0.0)) throw ConfigError("gen_metric_series: noise_sigma must be >= 0");
  for (std::size_t i = 1; i < centers.size(); ++i)
    if (!(centers[i] > centers[i - 1])) throw ConfigError("gen_metric_series: centers must be increasing");

  const bool logistic = std::holds_alternative<LogisticModelParams>(model);
  BinnedMetricSeries s;
  s.band = "synthetic";
  s.metric = logistic ? Metric::sparsity : Metric::power;
  s.delta_h = centers.size() > 1 ? centers[1] - centers[0] : 10.0;
  Rng rng(seed);
  for (double h : centers) {
    double v = logistic ? logistic_eval(std::get<LogisticModelParams>(model), h)
                        : exp_eval(std::get<ExpModelParams>(model), h);
    if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
    if (logistic) v = std::clamp(v, 0.0, 1.0);
    s.bins.push_back({h, v, noise_sigma, nominal_count});
  }
  return s;
}

struct EmitterSpec {
  std::vector<std::size_t> bins;  // band-relative bin indices
  std::optional<double> peak_power_db;  // defaults to the band's planted power asymptote
  double activation_h50_m = 0.0;
  double activation_k = 1.0;
  bool always_on = false;
  double jitter_db = 0.0;  // std of the log-normal per-bin jitter
};

struct BandScenario {
  BandSpec band;
  ExpModelParams power{-20.0, -60.0, 30.0};
  ExpModelParams entropy{0.9, 0.6, 60.0};
  LogisticModelParams sparsity{0.1, 50.0};
  double noise_floor_db = -100.0;
  std::vector<EmitterSpec> emitters;
};

struct TrajectoryPoint {
  double timestamp_s = 0.0;
  double altitude_m = 0.0;
};

/// Constant-rate climb from the ground to h_max, an optional dwell, and an
/// optional symmetric descent, sampled every interval_s.
struct AscentProfile {
  double h_max_m = 200.0;
  double rate_mps = 1.0;
  double dwell_s = 0.0;
  double interval_s = 2.0;
  bool descend = false;

  [[nodiscard]] std::vector<TrajectoryPoint> sample() const {
    if (!(h_max_m >= 0.0 && rate_mps > 0.0 && dwell_s >= 0.0 && interval_s > 0.0))
      throw ConfigError("trajectory: invalid ascent profile");
    const double t_up = h_max_m / rate_mps;
    const double t_end = t_up + dwell_s + (descend ? t_up : 0.0);
    std::vector<TrajectoryPoint> out;
    for (std::size_t i = 0;; ++i) {
      const double t = static_cast<double>(i) * interval_s;
      if (t > t_end + 1e-9) break;
      double h = 0.0;
      if (t <= t_up) h = rate_mps * t;
      else if (t <= t_up + dwell_s) h = h_max_m;
      else h = std::max(0.0, h_max_m - rate_mps * (t - t_up - dwell_s));
      out.push_back({t, h});
    }
    return out;
  }
};

struct ScenarioSpec {
  SweepConfig sweep;
  double gain_offset_db = 0.0;
  double background_noise_db = -100.0;
  // Periodograms averaged per PSD bin; sets the spread of the noise floor.
  double noise_averages = 1951.0;
  std::vector<BandScenario> bands;
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t seed = 1;
};

struct BandTruth {
  std::string name;
  std::size_t n_bins = 0;
  ExpModelParams power;
  ExpModelParams entropy;
  LogisticModelParams sparsity;
  double noise_floor_db = 0.0;
  std::size_t emitters = 0;
  double occupied_fraction = 0.0;
  // Median of activation_h50 weighted by occupied bin count (switching emitters only).
  std::optional<double> weighted_median_activation_h50_m;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  bool seed_override = false;
  double noise_averages = 0.0;
  double background_noise_db = 0.0;
  double gain_offset_db = 0.0;
  std::vector<BandTruth> bands;
};

struct SyntheticDataset {
  SweepConfig sweep;
  FrequencyGrid grid;
  std::vector<BandDefinition> bands;
  std::vector<SweepRecord> records;
  GroundTruth truth;
};

inline std::optional<double> weighted_median_activation(const std::vector<EmitterSpec>& emitters) {
  std::vector<std::pair<double, double>> items;
  double total = 0.0;
  for (const auto& e : emitters) {
    if (e.always_on || e.bins.empty()) continue;
    items.emplace_back(e.activation_h50_m, static_cast<double>(e.bins.size()));
    total += static_cast<double>(e.bins.size());
  }
  if (items.empty()) return std::nullopt;
  std::sort(items.begin(), items.end());
  double cum = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    cum += items[i].second;
    if (cum == 0.5 * total && i + 1 < items.size()) return 0.5 * (items[i].first + items[i + 1].first);
    if (cum >= 0.5 * total) return items[i].first;
  }
  return items.back().first;
}

inline void validate_scenario(const ScenarioSpec& spec, const std::vector<BandDefinition>& resolved) {
  if (spec.trajectory.empty()) throw ConfigError("scenario: trajectory is empty");
  for (const auto& p : spec.trajectory)
    if (!(p.altitude_m >= 0.0) || !std::isfinite(p.altitude_m) || !std::isfinite(p.timestamp_s))
      throw ConfigError("scenario: trajectory altitudes must be finite and >= 0");
  if (!(spec.noise_averages >= 1.0)) throw ConfigError("scenario: noise_averages must be >= 1");
  for (std::size_t b = 0; b < spec.bands.size(); ++b) {
    const auto& band = spec.bands[b];
    if (!band.power.valid()) throw ConfigError("scenario: band '" + band.band.name + "' has invalid power parameters");
    for (const auto& e : band.emitters) {
      if (!(e.activation_k > 0.0)) throw ConfigError("scenario: activation_k must be > 0");
      if (!(e.jitter_db >= 0.0)) throw ConfigError("scenario: jitter_db must be >= 0");
      for (std::size_t i : e.bins)
        if (i >= resolved[b].n_bins)
          throw ConfigError("scenario: emitter bin " + std::to_string(i) + " lies outside band '" +
                            band.band.name + "' (" + std::to_string(resolved[b].n_bins) + " bins)");
    }
  }
}

/// Builds one SweepRecord per trajectory point. Active emitter bins carry
/// peak - (x_inf - x_zero) * exp(-h / tau) dB of the band's planted power
/// model plus jitter; every other bin is receiver noise, an average of
/// noise_averages exponential periodogram values around its floor. Each
/// snapshot is cut into per-capture PSDs and reassembled through
/// trim_and_place.
inline SyntheticDataset gen_sweep_dataset(const ScenarioSpec& spec) {
  SyntheticDataset out;
  out.sweep = spec.sweep;
  out.grid = build_frequency_grid(spec.sweep);
  for (const auto& b : spec.bands) out.bands.push_back(resolve_band(out.grid, b.band));
  validate_scenario(spec, out.bands);

  const std::size_t n = out.grid.size();
  std::vector<double> floor_lin(n, db_to_linear(spec.background_noise_db));
  for (std::size_t b = spec.bands.size(); b-- > 0;) {
    const auto& def = out.bands[b];
    for (std::size_t i = 0; i < def.n_bins; ++i) floor_lin[def.first_bin + i] = db_to_linear(spec.bands[b].noise_floor_db);
  }

  Rng rng(spec.seed);
  const double shape = spec.noise_averages;
  const std::size_t n_captures = capture_count(spec.sweep);
  const std::size_t retained = spec.sweep.retained_bins();
  const double edge_fill = db_to_linear(spec.background_noise_db);
  std::vector<double> grid_psd(n);
  std::vector<double> emitter_lin(n);
  std::vector<bool> occupied(n);
  std::vector<double> capture(spec.sweep.fft_size);

  for (const auto& pt : spec.trajectory) {
    const double h = pt.altitude_m;
    for (std::size_t i = 0; i < n; ++i) grid_psd[i] = floor_lin[i] * rng.gamma(shape) / shape;

    std::fill(emitter_lin.begin(), emitter_lin.end(), 0.0);
    std::fill(occupied.begin(), occupied.end(), false);
    for (std::size_t b = 0; b < spec.bands.size(); ++b) {
      const auto& band = spec.bands[b];
      const auto& def = out.bands[b];
      const double excess = band.power.x_inf - band.power.x_zero;
      for (const auto& e : band.emitters) {
        const double u = rng.uniform();
        const bool active = e.always_on || u < logistic_eval({e.activation_k, e.activation_h50_m}, h);
        const double level_db = e.peak_power_db.value_or(band.power.x_inf) - excess * std::exp(-h / band.power.tau);
        for (std::size_t i : e.bins) {
          const double jitter = e.jitter_db > 0.0 ? e.jitter_db * rng.normal() : 0.0;
          if (!active) continue;
          emitter_lin[def.first_bin + i] += db_to_linear(level_db + jitter);
          occupied[def.first_bin + i] = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (occupied[i]) grid_psd[i] = emitter_lin[i];

    SweepAssembler assembler(spec.sweep, out.grid, pt.timestamp_s, h, spec.gain_offset_db);
    for (std::size_t c = 0; c < n_captures; ++c) {
      std::fill(capture.begin(), capture.end(), edge_fill);
      std::copy_n(grid_psd.begin() + static_cast<std::ptrdiff_t>(c * retained), retained,
                  capture.begin() + static_cast<std::ptrdiff_t>(spec.sweep.edge_trim));
      assembler.place(capture, capture_center_hz(spec.sweep, c));
    }
    out.records.push_back(std::move(assembler).finish());
  }

  out.truth.seed = spec.seed;
  out.truth.noise_averages = spec.noise_averages;
  out.truth.background_noise_db = spec.background_noise_db;
  out.truth.gain_offset_db = spec.gain_offset_db;
  for (std::size_t b = 0; b < spec.bands.size(); ++b) {
    const auto& band = spec.bands[b];
    BandTruth t;
    t.name = band.band.name;
    t.n_bins = out.bands[b].n_bins;
    t.power = band.power;
    t.entropy = band.entropy;
    t.sparsity = band.sparsity;
    t.noise_floor_db = band.noise_floor_db;
    t.emitters = band.emitters.size();
    std::vector<bool> covered(t.n_bins, false);
    for (const auto& e : band.emitters)
      for (std::size_t i : e.bins) covered[i] = true;
    t.occupied_fraction =
        static_cast<double>(std::count(covered.begin(), covered.end(), true)) / static_cast<double>(t.n_bins);
    t.weighted_median_activation_h50_m = weighted_median_activation(band.emitters);
    out.truth.bands.push_back(std::move(t));
  }
  return out;
}

}  // namespace adssm
