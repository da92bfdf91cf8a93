#pragma once

// Per-snapshot band metrics: band-average power, spectral entropy and
// threshold sparsity, plus the campaign-wide noise-floor percentile.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adssm/errors.hpp"
#include "adssm/spectrum_core.hpp"

namespace adssm {

/// Default regularizer in the entropy normalization (absolute, linear units).
inline constexpr double kEntropyEps = 1e-20;

struct ThresholdSpec {
  double percentile = 5.0;
  double margin_db = 3.0;

  void validate() const {
    if (!(percentile > 0.0 && percentile < 100.0)) throw ConfigError("threshold: percentile must be in (0, 100)");
    if (!(margin_db >= 0.0) || !std::isfinite(margin_db)) throw ConfigError("threshold: margin_db must be >= 0");
  }
};

struct EntropyResult {
  double bits = 0.0;
  double normalized = 0.0;
};

struct MetricSample {
  double timestamp_s = 0.0;
  double altitude_m = 0.0;
  double power_db = 0.0;
  double entropy_bits = 0.0;
  double entropy_norm = 0.0;
  double sparsity = 0.0;
};

/// One metric-file row: a snapshot's metrics for one band.
struct MetricRow {
  std::string band;
  MetricSample sample;
};

/// 10*log10 of the arithmetic mean. All-zero input yields -infinity, which
/// downstream binning treats as a flagged sample and drops.
inline double band_average_power(std::span<const double> band_psd) {
  if (band_psd.empty()) throw InputError("band_average_power: empty band");
  double sum = 0.0;
  for (double v : band_psd) {
    if (!(v >= 0.0)) throw InputError("band_average_power: negative or NaN power");
    sum += v;
  }
  if (sum == 0.0) return -std::numeric_limits<double>::infinity();
  return linear_to_db(sum / static_cast<double>(band_psd.size()));
}

/// Shannon entropy of the in-band power distribution, in bits, and its value
/// normalized by log2 of the bin count. A single-bin band has zero entropy.
inline EntropyResult spectral_entropy(std::span<const double> band_psd, double eps = kEntropyEps) {
  if (band_psd.empty()) throw InputError("spectral_entropy: empty band");
  double total = 0.0;
  for (double v : band_psd) {
    if (!(v >= 0.0)) throw InputError("spectral_entropy: negative or NaN power");
    total += v;
  }
  if (band_psd.size() == 1) return {};
  const double denom = total + eps;
  double h = 0.0;
  for (double v : band_psd) {
    const double p = v / denom;
    if (p > 0.0) h -= p * std::log2(p);
  }
  const double h_max = std::log2(static_cast<double>(band_psd.size()));
  h = std::clamp(h, 0.0, h_max);
  return {h, h / h_max};
}

/// Percentile of the dB-converted pool, linear interpolation between the order
/// statistics around fractional rank p/100 * (n - 1).
inline double noise_floor(std::span<const double> pool_linear, const ThresholdSpec& spec = {}) {
  spec.validate();
  if (pool_linear.empty()) throw InputError("noise_floor: empty sample pool");
  std::vector<double> db(pool_linear.size());
  for (std::size_t i = 0; i < pool_linear.size(); ++i) {
    const double v = pool_linear[i];
    if (!(v >= 0.0)) throw InputError("noise_floor: negative or NaN power");
    db[i] = v > 0.0 ? linear_to_db(v) : -std::numeric_limits<double>::infinity();
  }
  const double rank = spec.percentile / 100.0 * static_cast<double>(db.size() - 1);
  const auto lo_idx = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo_idx);
  std::nth_element(db.begin(), db.begin() + static_cast<std::ptrdiff_t>(lo_idx), db.end());
  const double lo = db[lo_idx];
  if (frac == 0.0 || lo_idx + 1 >= db.size()) return lo;
  const double hi = *std::min_element(db.begin() + static_cast<std::ptrdiff_t>(lo_idx) + 1, db.end());
  if (lo == hi || std::isinf(lo)) return lo;
  return lo + frac * (hi - lo);
}

/// Detection threshold: noise floor plus margin, in dB.
inline double detection_threshold_db(std::span<const double> pool_linear, const ThresholdSpec& spec = {}) {
  return noise_floor(pool_linear, spec) + spec.margin_db;
}

/// Fraction of bins whose dB power is strictly above gamma_db.
inline double sparsity(std::span<const double> band_psd, double gamma_db) {
  if (band_psd.empty()) throw InputError("sparsity: empty band");
  std::size_t above = 0;
  for (double v : band_psd)
    if (v > 0.0 && linear_to_db(v) > gamma_db) ++above;
  return static_cast<double>(above) / static_cast<double>(band_psd.size());
}

inline MetricSample compute_metrics(std::span<const double> band_psd, double gamma_db, double eps = kEntropyEps) {
  MetricSample s;
  s.power_db = band_average_power(band_psd);
  const auto e = spectral_entropy(band_psd, eps);
  s.entropy_bits = e.bits;
  s.entropy_norm = e.normalized;
  s.sparsity = sparsity(band_psd, gamma_db);
  return s;
}

}  // namespace adssm
