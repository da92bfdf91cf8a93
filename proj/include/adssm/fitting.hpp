#pragma once

// Least-squares estimation of the altitude model parameters from binned
// metric series, and goodness-of-fit statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adssm/binning.hpp"
#include "adssm/errors.hpp"
#include "adssm/model.hpp"
#include "adssm/nelder_mead.hpp"

namespace adssm {

enum class ModelKind { exp, exp_reduced, logistic };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::exp: return "exp";
    case ModelKind::exp_reduced: return "exp_reduced";
    case ModelKind::logistic: return "logistic";
  }
  return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "exp") return ModelKind::exp;
  if (s == "exp_reduced") return ModelKind::exp_reduced;
  if (s == "logistic") return ModelKind::logistic;
  throw InputError("unknown model '" + s + "'");
}

using ModelParams = std::variant<ExpModelParams, LogisticModelParams>;

struct Goodness {
  double rmse = 0.0;
  std::optional<double> r2;  // empty when the series has zero variance
};

struct FitReport {
  std::string band;
  Metric metric = Metric::power;
  ModelKind model = ModelKind::exp;
  ModelParams params = ExpModelParams{};
  double rmse = 0.0;
  std::optional<double> r2;
  std::optional<TransitionHeights> transitions;
  TransitionFractions q = kDefaultTransitionFractions;
  std::size_t n_bins = 0;
  double objective = 0.0;
  FitOptions options;
  std::vector<std::string> flags;
  // Bin count of the band; converts normalized entropy back to bits.
  std::optional<std::size_t> band_bins;

  [[nodiscard]] const ExpModelParams& exp_params() const { return std::get<ExpModelParams>(params); }
  [[nodiscard]] const LogisticModelParams& logistic_params() const { return std::get<LogisticModelParams>(params); }

  [[nodiscard]] double eval(double h) const {
    if (const auto* e = std::get_if<ExpModelParams>(&params)) return exp_eval(*e, h);
    return logistic_eval(std::get<LogisticModelParams>(params), h);
  }
};

inline Goodness goodness(const BinnedMetricSeries& series, const std::function<double(double)>& model) {
  const std::size_t n = series.bins.size();
  if (n < 2) throw InsufficientDataError("goodness: need at least 2 bins");
  double mean = 0.0;
  for (const auto& b : series.bins) mean += b.mean;
  mean /= static_cast<double>(n);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto& b : series.bins) {
    const double r = b.mean - model(b.center_m);
    ss_res += r * r;
    ss_tot += (b.mean - mean) * (b.mean - mean);
  }
  Goodness g;
  g.rmse = std::sqrt(ss_res / static_cast<double>(n));
  if (ss_tot > 0.0) g.r2 = 1.0 - ss_res / ss_tot;
  return g;
}

namespace detail {

inline void require_finite_means(const BinnedMetricSeries& s) {
  for (const auto& b : s.bins)
    if (!std::isfinite(b.mean) || !std::isfinite(b.center_m)) throw InputError("fit: series contains non-finite values");
}

inline double altitude_span(const BinnedMetricSeries& s) {
  return s.bins.back().center_m - s.bins.front().center_m;
}

inline FitReport finish_report(const BinnedMetricSeries& series, FitReport r) {
  r.band = series.band;
  r.metric = series.metric;
  r.n_bins = series.bins.size();
  const auto g = goodness(series, [&](double h) { return r.eval(h); });
  r.rmse = g.rmse;
  r.r2 = g.r2;
  if (!g.r2) r.flags.push_back("r2 undefined: zero-variance series");
  return r;
}

}  // namespace detail

/// Two-parameter exponential fit with the altitude constant held at tau_fixed
/// (default: a third of the altitude span). Linear in (x_inf, x_zero), so it
/// is solved directly on the basis {1 - e^(-h/tau), e^(-h/tau)}.
inline FitReport fit_exp_reduced(const BinnedMetricSeries& series, std::optional<double> tau_fixed = std::nullopt,
                                 const FitOptions& opts = {},
                                 const TransitionFractions& q = kDefaultTransitionFractions) {
  opts.validate();
  if (series.bins.size() < 3) throw InsufficientDataError("fit_exp_reduced: need at least 3 bins");
  detail::require_finite_means(series);
  const double tau = tau_fixed.value_or(detail::altitude_span(series) / 3.0);
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw InsufficientDataError("fit_exp_reduced: altitude constant must be positive (all centers equal?)");

  double saa = 0.0, sab = 0.0, sbb = 0.0, say = 0.0, sby = 0.0;
  for (const auto& bin : series.bins) {
    const double b = std::exp(-bin.center_m / tau);
    const double a = 1.0 - b;
    saa += a * a;
    sab += a * b;
    sbb += b * b;
    say += a * bin.mean;
    sby += b * bin.mean;
  }
  const double det = saa * sbb - sab * sab;
  if (!(det > 1e-12 * saa * sbb)) throw FitError("fit_exp_reduced: design is rank deficient (all centers equal)");

  ExpModelParams p;
  p.tau = tau;
  p.x_inf = (say * sbb - sby * sab) / det;
  p.x_zero = (sby * saa - say * sab) / det;

  FitReport r;
  r.model = ModelKind::exp_reduced;
  r.params = p;
  r.options = opts;
  r.q = q;
  r.transitions = transition_heights_exp(p, q);
  if (!r.transitions) r.flags.push_back("transition heights undefined: x_inf == x_zero");
  r = detail::finish_report(series, std::move(r));
  r.objective = r.rmse * r.rmse * static_cast<double>(r.n_bins);
  return r;
}

/// Three-parameter exponential relaxation fit. Searches over
/// (x_inf, x_zero, log tau) starting from the last-bin mean, first-bin mean
/// and a third of the altitude span. A flat series is handed to
/// fit_exp_reduced and flagged.
inline FitReport fit_exp(const BinnedMetricSeries& series, const FitOptions& opts = {},
                         const TransitionFractions& q = kDefaultTransitionFractions) {
  opts.validate();
  validate_fractions(q);
  if (series.bins.size() < 4) throw InsufficientDataError("fit_exp: need at least 4 bins");
  detail::require_finite_means(series);
  const double span = detail::altitude_span(series);
  if (!(span > 0.0)) throw InsufficientDataError("fit_exp: altitude span is zero");

  const auto means = series.means();
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  if (*hi - *lo <= opts.f_tol * std::abs(mean)) {
    auto r = fit_exp_reduced(series, std::nullopt, opts, q);
    r.flags.insert(r.flags.begin(), "degenerate: flat series, reduced model fitted");
    return r;
  }

  const auto centers = series.centers();
  auto unpack = [](const std::vector<double>& x) { return ExpModelParams{x[0], x[1], std::exp(x[2])}; };
  const Objective objective = [&](const std::vector<double>& x) {
    const auto p = unpack(x);
    double ss = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double r = means[i] - exp_eval(p, centers[i]);
      ss += r * r;
    }
    return ss;
  };
  const std::vector<double> x0{means.back(), means.front(), std::log(span / 3.0)};
  const auto best = nelder_mead(objective, x0, opts);

  FitReport r;
  r.model = ModelKind::exp;
  r.params = unpack(best.x);
  r.options = opts;
  r.q = q;
  r.objective = best.f;
  r.transitions = transition_heights_exp(r.exp_params(), q);
  if (!r.transitions) r.flags.push_back("transition heights undefined: x_inf == x_zero");
  if (!best.converged) r.flags.push_back("optimizer stopped at max_iters");
  if (r.exp_params().tau > 10.0 * span)
    r.flags.push_back("altitude constant exceeds 10x the altitude span: asymptote is an extrapolation");
  return detail::finish_report(series, std::move(r));
}

/// Logistic fit over (log k, h_s). The midpoint starts at the first bin where
/// the series crosses (min + max) / 2 and the steepness at 4 / (10-90 % width).
inline FitReport fit_logistic(const BinnedMetricSeries& series, const FitOptions& opts = {},
                              const TransitionFractions& q = kDefaultTransitionFractions) {
  opts.validate();
  validate_fractions(q);
  if (series.bins.size() < 3) throw InsufficientDataError("fit_logistic: need at least 3 bins");
  detail::require_finite_means(series);
  const auto means = series.means();
  const auto centers = series.centers();
  for (double m : means)
    if (m < 0.0 || m > 1.0) throw InputError("fit_logistic: series values must lie in [0, 1]");

  std::vector<std::string> flags;
  const auto [lo_it, hi_it] = std::minmax_element(means.begin(), means.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  const double mid = lo + 0.5 * range;

  std::optional<double> h_s0;
  for (std::size_t i = 1; i < means.size() && range > 0.0; ++i) {
    if ((means[i - 1] < mid) != (means[i] < mid)) {
      h_s0 = centers[i];
      break;
    }
  }
  if (!h_s0) {
    flags.push_back("degenerate: series never crosses its midpoint");
    const std::size_t m = centers.size();
    h_s0 = m % 2 ? centers[m / 2] : 0.5 * (centers[m / 2 - 1] + centers[m / 2]);
  }

  double k0 = 1e-3;
  if (range > 0.0) {
    auto first_reaching = [&](double level) -> std::optional<double> {
      for (std::size_t i = 0; i < means.size(); ++i)
        if (means[i] >= level) return centers[i];
      return std::nullopt;
    };
    const auto h10 = first_reaching(lo + 0.1 * range);
    const auto h90 = first_reaching(lo + 0.9 * range);
    double width = (h10 && h90) ? *h90 - *h10 : 0.0;
    if (!(width > 0.0)) width = centers.size() > 1 ? centers[1] - centers[0] : 1.0;
    k0 = std::max(4.0 / width, 1e-3);
  }

  const Objective objective = [&](const std::vector<double>& x) {
    const LogisticModelParams p{std::exp(x[0]), x[1]};
    double ss = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double r = means[i] - logistic_eval(p, centers[i]);
      ss += r * r;
    }
    return ss;
  };
  const auto best = nelder_mead(objective, {std::log(k0), *h_s0}, opts);

  FitReport r;
  r.model = ModelKind::logistic;
  r.params = LogisticModelParams{std::exp(best.x[0]), best.x[1]};
  r.options = opts;
  r.q = q;
  r.objective = best.f;
  r.flags = std::move(flags);
  if (!best.converged) r.flags.push_back("optimizer stopped at max_iters");
  r.transitions = transition_heights_logistic(r.logistic_params(), q);
  return detail::finish_report(series, std::move(r));
}

}  // namespace adssm
