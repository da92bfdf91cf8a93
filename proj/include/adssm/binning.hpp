#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adssm/errors.hpp"

namespace adssm {

enum class Metric { power, entropy_norm, sparsity };

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::power: return "power";
    case Metric::entropy_norm: return "entropy_norm";
    case Metric::sparsity: return "sparsity";
  }
  return "?";
}

inline Metric parse_metric(const std::string& s) {
  if (s == "power") return Metric::power;
  if (s == "entropy_norm") return Metric::entropy_norm;
  if (s == "sparsity") return Metric::sparsity;
  throw InputError("unknown metric '" + s + "'");
}

struct AltitudeBin {
  double center_m = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

struct BinnedMetricSeries {
  std::string band;
  Metric metric = Metric::power;
  double delta_h = 10.0;
  std::vector<AltitudeBin> bins;

  [[nodiscard]] std::vector<double> centers() const {
    std::vector<double> out;
    out.reserve(bins.size());
    for (const auto& b : bins) out.push_back(b.center_m);
    return out;
  }
  [[nodiscard]] std::vector<double> means() const {
    std::vector<double> out;
    out.reserve(bins.size());
    for (const auto& b : bins) out.push_back(b.mean);
    return out;
  }
};

struct AltitudeSample {
  double altitude_m = 0.0;
  double value = 0.0;
};

struct BinningOptions {
  double delta_h = 10.0;
  std::size_t min_count = 3;
};

/// Groups samples into [k*dh, (k+1)*dh) bins and reports per-bin mean and
/// population std. Non-finite values are dropped before binning; bins with
/// fewer than min_count samples are dropped after.
inline BinnedMetricSeries bin_by_altitude(std::span<const AltitudeSample> samples, double delta_h,
                                          std::size_t min_count) {
  if (!(delta_h > 0.0) || !std::isfinite(delta_h)) throw ConfigError("binning: delta_h must be > 0");
  std::map<long long, std::vector<double>> groups;
  for (const auto& s : samples) {
    if (!std::isfinite(s.altitude_m) || s.altitude_m < 0.0)
      throw InputError("binning: altitudes must be finite and >= 0");
    if (!std::isfinite(s.value)) continue;
    groups[static_cast<long long>(std::floor(s.altitude_m / delta_h))].push_back(s.value);
  }

  BinnedMetricSeries out;
  out.delta_h = delta_h;
  for (auto& [k, values] : groups) {
    if (values.size() < min_count) continue;
    // Sorted accumulation makes the result independent of input order.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.bins.push_back({(static_cast<double>(k) + 0.5) * delta_h, mean, std::sqrt(ss / n), values.size()});
  }
  if (out.bins.empty()) throw InsufficientDataError("binning: no altitude bin has at least min_count samples");
  return out;
}

inline BinnedMetricSeries bin_by_altitude(std::span<const AltitudeSample> samples, const BinningOptions& opts) {
  return bin_by_altitude(samples, opts.delta_h, opts.min_count);
}

}  // namespace adssm
