#pragma once

// Welch PSD estimation from complex baseband captures, and assembly of the
// per-capture estimates into a full-range SweepRecord.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adssm/errors.hpp"
#include "adssm/fft.hpp"
#include "adssm/spectrum_core.hpp"

namespace adssm {

enum class WindowType { rectangular, hann };
enum class PsdScaling { density, spectrum };

inline std::string to_string(WindowType w) { return w == WindowType::hann ? "hann" : "rectangular"; }
inline std::string to_string(PsdScaling s) { return s == PsdScaling::density ? "density" : "spectrum"; }

inline WindowType parse_window(const std::string& s) {
  if (s == "hann") return WindowType::hann;
  if (s == "rectangular" || s == "boxcar") return WindowType::rectangular;
  throw ConfigError("unknown window '" + s + "'");
}

struct WelchConfig {
  std::size_t fft_size = 512;
  double overlap_fraction = 0.5;
  WindowType window = WindowType::hann;
  PsdScaling scaling = PsdScaling::density;

  void validate() const {
    if (!detail::is_power_of_two(fft_size)) throw ConfigError("welch: fft_size must be a power of two");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
      throw ConfigError("welch: overlap_fraction must be in [0, 1)");
  }

  [[nodiscard]] std::size_t hop() const {
    const auto overlap = static_cast<std::size_t>(std::floor(static_cast<double>(fft_size) * overlap_fraction));
    return fft_size - overlap;
  }
};

/// Periodic window of length n.
inline std::vector<double> make_window(WindowType type, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (type == WindowType::hann) {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

inline std::size_t welch_segment_count(std::size_t n_samples, const WelchConfig& cfg) {
  if (n_samples < cfg.fft_size) return 0;
  return (n_samples - cfg.fft_size) / cfg.hop() + 1;
}

/// Segment-averaged periodogram, DC-centered: output bin k sits at
/// (k - fft_size/2) * fs / fft_size.
inline std::vector<double> welch_psd(std::span<const std::complex<double>> iq, double fs_hz,
                                     const WelchConfig& cfg = {}) {
  cfg.validate();
  if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) throw InputError("welch: sample rate must be positive");
  const std::size_t n = cfg.fft_size;
  if (iq.size() < n)
    throw InputError("welch: need at least " + std::to_string(n) + " samples, got " + std::to_string(iq.size()));
  for (const auto& s : iq)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw InputError("welch: non-finite sample");

  const auto window = make_window(cfg.window, n);
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (double w : window) {
    sum_w += w;
    sum_w2 += w * w;
  }
  const double scale =
      cfg.scaling == PsdScaling::density ? 1.0 / (fs_hz * sum_w2) : 1.0 / (sum_w * sum_w);

  const std::size_t hop = cfg.hop();
  const std::size_t segments = welch_segment_count(iq.size(), cfg);
  std::vector<double> acc(n, 0.0);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t start = s * hop;
    for (std::size_t i = 0; i < n; ++i) buf[i] = iq[start + i] * window[i];
    detail::fft_inplace(buf);
    for (std::size_t k = 0; k < n; ++k) acc[k] += std::norm(buf[k]);
  }

  std::vector<double> out(n);
  const double norm = scale / static_cast<double>(segments);
  for (std::size_t k = 0; k < n; ++k) out[(k + n / 2) % n] = acc[k] * norm;
  return out;
}

/// Writes the retained middle of one capture's PSD into the grid slice for
/// center_hz. Positions outside that slice are left as they were.
inline SweepRecord trim_and_place(std::span<const double> psd, double center_hz, const SweepConfig& cfg,
                                  const FrequencyGrid& grid, SweepRecord into) {
  if (psd.size() != cfg.fft_size)
    throw StructuralError("placement: capture has " + std::to_string(psd.size()) + " bins, expected " +
                          std::to_string(cfg.fft_size));
  const auto idx = schedule_index(cfg, center_hz);
  if (!idx) throw PlacementError("placement: center " + std::to_string(center_hz) + " Hz is not on the sweep schedule");
  const std::size_t retained = cfg.retained_bins();
  const std::size_t offset = *idx * retained;
  if (offset + retained > grid.size()) throw PlacementError("placement: capture falls outside the grid");
  if (into.psd.empty()) into.psd.assign(grid.size(), 0.0);
  if (into.psd.size() != grid.size()) throw StructuralError("placement: record length does not match grid");
  for (std::size_t k = 0; k < retained; ++k) into.psd[offset + k] = psd[cfg.edge_trim + k];
  return into;
}

/// Single-writer helper that tracks which grid positions a sweep has filled.
class SweepAssembler {
 public:
  SweepAssembler(SweepConfig cfg, FrequencyGrid grid, double timestamp_s, double altitude_m,
                 double gain_offset_db = 0.0)
      : cfg_(cfg), grid_(std::move(grid)), written_(grid_.size(), false) {
    record_.timestamp_s = timestamp_s;
    record_.altitude_m = altitude_m;
    record_.gain_offset_db = gain_offset_db;
    record_.psd.assign(grid_.size(), 0.0);
  }

  void place(std::span<const double> psd, double center_hz) {
    record_ = trim_and_place(psd, center_hz, cfg_, grid_, std::move(record_));
    const std::size_t offset = *schedule_index(cfg_, center_hz) * cfg_.retained_bins();
    for (std::size_t k = 0; k < cfg_.retained_bins(); ++k) {
      if (written_[offset + k]) throw PlacementError("placement: grid position written twice");
      written_[offset + k] = true;
    }
  }

  [[nodiscard]] std::size_t unwritten() const {
    std::size_t n = 0;
    for (bool w : written_) n += w ? 0 : 1;
    return n;
  }

  [[nodiscard]] const SweepRecord& record() const { return record_; }

  SweepRecord finish() && {
    if (unwritten() != 0) throw PlacementError("placement: sweep incomplete, " + std::to_string(unwritten()) + " bins unwritten");
    return std::move(record_);
  }

 private:
  SweepConfig cfg_;
  FrequencyGrid grid_;
  SweepRecord record_;
  std::vector<bool> written_;
};

}  // namespace adssm
