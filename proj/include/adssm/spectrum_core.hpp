#pragma once

// Global frequency grid, band registry and sweep data model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adssm/errors.hpp"

namespace adssm {

/// Receiver sweep parameters. Defaults reproduce the helikite campaign:
/// 87 MHz to 6 GHz, 25.68 MHz step, 30.72 MHz sampling, 512-point FFT,
/// 500k samples per capture. The edge trim of 42 bins per side makes the
/// retained 428 bins span exactly one step.
struct SweepConfig {
  double f_start_hz = 87e6;
  double f_stop_hz = 6e9;
  double step_hz = 25.68e6;
  double sample_rate_hz = 30.72e6;
  std::size_t fft_size = 512;
  std::size_t edge_trim = 42;
  std::size_t samples_per_capture = 500'000;

  [[nodiscard]] double bin_width_hz() const { return sample_rate_hz / static_cast<double>(fft_size); }
  [[nodiscard]] std::size_t retained_bins() const { return fft_size - 2 * edge_trim; }
  [[nodiscard]] double retained_span_hz() const {
    return bin_width_hz() * static_cast<double>(retained_bins());
  }

  void validate() const {
    if (!(std::isfinite(f_start_hz) && std::isfinite(f_stop_hz) && f_start_hz < f_stop_hz))
      throw ConfigError("sweep: f_start_hz must be < f_stop_hz");
    if (!(step_hz > 0.0) || !std::isfinite(step_hz)) throw ConfigError("sweep: step_hz must be > 0");
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
      throw ConfigError("sweep: sample_rate_hz must be > 0");
    if (fft_size == 0) throw ConfigError("sweep: fft_size must be positive");
    if (fft_size <= 2 * edge_trim) throw ConfigError("sweep: fft_size must exceed 2*edge_trim");
    if (samples_per_capture == 0) throw ConfigError("sweep: samples_per_capture must be positive");
  }
};

/// Uniform grid of bin center frequencies.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(double first_bin_hz, double bin_width_hz, std::size_t n_bins)
      : first_bin_hz_(first_bin_hz), bin_width_hz_(bin_width_hz) {
    if (!(bin_width_hz > 0.0) || !std::isfinite(bin_width_hz) || !std::isfinite(first_bin_hz))
      throw ConfigError("grid: bin width must be positive and finite");
    if (n_bins == 0) throw ConfigError("grid: n_bins must be positive");
    bin_freqs_.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i)
      bin_freqs_[i] = first_bin_hz + static_cast<double>(i) * bin_width_hz;
  }

  [[nodiscard]] std::size_t size() const { return bin_freqs_.size(); }
  [[nodiscard]] double bin_width_hz() const { return bin_width_hz_; }
  [[nodiscard]] double first_bin_hz() const { return first_bin_hz_; }
  [[nodiscard]] double last_bin_hz() const { return bin_freqs_.back(); }
  [[nodiscard]] double freq(std::size_t i) const { return bin_freqs_.at(i); }
  [[nodiscard]] std::span<const double> bin_freqs() const { return bin_freqs_; }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.size() == b.size() && a.first_bin_hz_ == b.first_bin_hz_ && a.bin_width_hz_ == b.bin_width_hz_;
  }

 private:
  double first_bin_hz_ = 0.0;
  double bin_width_hz_ = 1.0;
  std::vector<double> bin_freqs_;
};

/// Named allocation resolved to a contiguous run of grid bins.
struct BandDefinition {
  std::string name;
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
  std::size_t first_bin = 0;
  std::size_t n_bins = 0;
  std::size_t grid_size = 0;  // size of the grid it was resolved against

  [[nodiscard]] std::size_t last_bin() const { return first_bin + n_bins - 1; }
  [[nodiscard]] std::vector<std::size_t> bins() const {
    std::vector<std::size_t> out(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) out[i] = first_bin + i;
    return out;
  }
};

/// Unresolved registry entry.
struct BandSpec {
  std::string name;
  double f_low_hz = 0.0;
  double f_high_hz = 0.0;
};

/// One full-range PSD snapshot, linear scale, on the global grid.
struct SweepRecord {
  double timestamp_s = 0.0;
  double altitude_m = 0.0;
  std::vector<double> psd;
  double gain_offset_db = 0.0;

  void validate(const FrequencyGrid& grid) const {
    if (psd.size() != grid.size()) throw StructuralError("sweep record: psd length does not match grid");
    if (!std::isfinite(altitude_m)) throw InputError("sweep record: altitude must be finite");
    for (double v : psd)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("sweep record: psd values must be finite and >= 0");
  }
};

/// The six allocations analysed in the 2025 campaign.
inline std::vector<BandSpec> default_band_registry() {
  return {
      {"FM", 88e6, 108e6},
      {"5G Band n71 DL", 617e6, 652e6},
      {"LTE Band 13 DL", 746e6, 756e6},
      {"ISM", 902e6, 928e6},
      {"CBRS", 3550e6, 3700e6},
      {"5G NR C-Band", 3700e6, 3980e6},
  };
}

inline void check_step_matches_span(const SweepConfig& cfg) {
  const double span = cfg.retained_span_hz();
  const double diff = cfg.step_hz - span;
  if (std::abs(diff) > 1e-6 * span) {
    const std::string what = diff > 0 ? "gap" : "overlap";
    throw ConfigError("sweep: step_hz " + std::to_string(cfg.step_hz) + " does not match retained span " +
                      std::to_string(span) + " Hz (" + what + " of " + std::to_string(std::abs(diff)) +
                      " Hz between consecutive captures)");
  }
}

/// Number of captures needed so the retained bins reach f_stop.
inline std::size_t capture_count(const SweepConfig& cfg) {
  cfg.validate();
  const double bw = cfg.bin_width_hz();
  const double upper_offset =
      (static_cast<double>(cfg.fft_size / 2) - static_cast<double>(cfg.edge_trim) - 1.0) * bw;
  const double needed = (cfg.f_stop_hz - upper_offset - cfg.f_start_hz) / cfg.step_hz;
  if (needed <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(needed - 1e-9)) + 1;
}

inline double capture_center_hz(const SweepConfig& cfg, std::size_t index) {
  return cfg.f_start_hz + static_cast<double>(index) * cfg.step_hz;
}

/// Schedule index of a capture center, if it lies on the schedule.
inline std::optional<std::size_t> schedule_index(const SweepConfig& cfg, double center_hz) {
  const double pos = (center_hz - cfg.f_start_hz) / cfg.step_hz;
  const double nearest = std::round(pos);
  if (nearest < 0.0 || std::abs(pos - nearest) > 1e-6) return std::nullopt;
  const auto idx = static_cast<std::size_t>(nearest);
  if (idx >= capture_count(cfg)) return std::nullopt;
  return idx;
}

inline FrequencyGrid build_frequency_grid(const SweepConfig& cfg) {
  cfg.validate();
  check_step_matches_span(cfg);
  const std::size_t n_captures = capture_count(cfg);
  const double bw = cfg.bin_width_hz();
  const double first =
      cfg.f_start_hz + (static_cast<double>(cfg.edge_trim) - static_cast<double>(cfg.fft_size / 2)) * bw;
  return FrequencyGrid(first, bw, n_captures * cfg.retained_bins());
}

/// Resolves [f_low, f_high] to the grid bins whose centers fall inside it.
inline BandDefinition resolve_band(const FrequencyGrid& grid, const std::string& name, double f_low_hz,
                                   double f_high_hz) {
  if (!(f_low_hz < f_high_hz)) throw ConfigError("band '" + name + "': f_low must be < f_high");
  // Half a part-per-billion of a bin absorbs rounding in bin center arithmetic.
  const double slack = 1e-9 * grid.bin_width_hz();
  const auto freqs = grid.bin_freqs();
  auto lo = std::lower_bound(freqs.begin(), freqs.end(), f_low_hz - slack);
  auto hi = std::upper_bound(freqs.begin(), freqs.end(), f_high_hz + slack);
  if (lo >= hi)
    throw BandRangeError("band '" + name + "' [" + std::to_string(f_low_hz) + ", " + std::to_string(f_high_hz) +
                         "] Hz contains no grid bins");
  BandDefinition band;
  band.name = name;
  band.f_low_hz = f_low_hz;
  band.f_high_hz = f_high_hz;
  band.first_bin = static_cast<std::size_t>(lo - freqs.begin());
  band.n_bins = static_cast<std::size_t>(hi - lo);
  band.grid_size = grid.size();
  return band;
}

inline BandDefinition resolve_band(const FrequencyGrid& grid, const BandSpec& spec) {
  return resolve_band(grid, spec.name, spec.f_low_hz, spec.f_high_hz);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// In-band PSD slice with the campaign gain offset applied.
inline std::vector<double> extract_band_psd(const SweepRecord& rec, const BandDefinition& band) {
  if (rec.psd.size() != band.grid_size || band.first_bin + band.n_bins > rec.psd.size())
    throw StructuralError("band '" + band.name + "' was resolved against a different grid than the record");
  const double gain = db_to_linear(rec.gain_offset_db);
  std::vector<double> out(rec.psd.begin() + static_cast<std::ptrdiff_t>(band.first_bin),
                          rec.psd.begin() + static_cast<std::ptrdiff_t>(band.first_bin + band.n_bins));
  if (rec.gain_offset_db != 0.0)
    for (double& v : out) v *= gain;
  return out;
}

}  // namespace adssm
