#pragma once

// Derivative-free simplex minimization with deterministic restarts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "adssm/errors.hpp"
#include "adssm/random.hpp"

namespace adssm {

struct FitOptions {
  std::size_t max_iters = 2000;
  double x_tol = 1e-8;   // simplex size, relative to max(1, |x_best|)
  double f_tol = 1e-10;  // objective spread, relative to |f_best|
  std::size_t restarts = 3;
  std::uint64_t seed = 20250101;  // restart jitter sequence

  void validate() const {
    if (max_iters == 0) throw ConfigError("fit: max_iters must be positive");
    if (!(x_tol > 0.0)) throw ConfigError("fit: x_tol must be positive");
    if (!(f_tol > 0.0)) throw ConfigError("fit: f_tol must be positive");
  }
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;  // summed over all runs
  std::size_t evaluations = 0;
  bool converged = false;      // the best run met a tolerance before max_iters
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

struct SimplexRun {
  std::vector<double> x;
  double f;
  std::size_t iterations;
  std::size_t evaluations;
  bool converged;
};

inline SimplexRun nelder_mead_once(const Objective& objective, const std::vector<double>& x0, const FitOptions& opts) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  const std::size_t n = x0.size();
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = objective(x);
    return std::isfinite(v) ? v : HUGE_VAL;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] = x0[i] != 0.0 ? x0[i] * 1.05 : 0.00025;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto along = [&](std::vector<double>& out, double t, const std::vector<double>& from) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (from[j] - centroid[j]);
  };

  std::size_t iter = 0;
  bool converged = false;
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> p2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        p2[i] = std::move(pts[order[i]]);
        f2[i] = fv[order[i]];
      }
      pts = std::move(p2);
      fv = std::move(f2);
    }

    const auto& best = pts[0];
    double size = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(best[j]));
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - best[j]));
    const double spread = fv[n] - fv[0];
    // Floor of f_tol^2 lets fits whose optimum is an exact zero terminate.
    const bool x_ok = size <= opts.x_tol * scale;
    const bool f_ok = spread <= opts.f_tol * std::abs(fv[0]) + opts.f_tol * opts.f_tol;
    if ((x_ok && f_ok) || spread == 0.0) {
      converged = true;
      break;
    }
    if (iter >= opts.max_iters) break;
    ++iter;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    along(xr, -kReflect, pts[n]);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      along(xe, -kExpand, pts[n]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
      continue;
    }
    if (fr < fv[n]) {
      along(xc, -kContract, pts[n]);  // outside contraction
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[n] = xc;
        fv[n] = fc;
        continue;
      }
    } else {
      along(xc, kContract, pts[n]);  // inside contraction
      const double fc = eval(xc);
      if (fc < fv[n]) {
        pts[n] = xc;
        fv[n] = fc;
        continue;
      }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[0][j] + kShrink * (pts[i][j] - pts[0][j]);
      fv[i] = eval(pts[i]);
    }
  }
  return {pts[0], fv[0], iter, evals, converged};
}

}  // namespace detail

/// Minimizes objective from x0, then from `restarts` jittered copies of x0
/// (each coordinate scaled by a factor in [0.8, 1.2] drawn from opts.seed).
/// Returns the best point found; never worse than x0.
inline MinimizeResult nelder_mead(const Objective& objective, const std::vector<double>& x0, const FitOptions& opts = {}) {
  opts.validate();
  if (x0.empty()) throw ConfigError("nelder_mead: empty starting point");
  const double f0 = objective(x0);
  if (!std::isfinite(f0)) throw FitError("nelder_mead: objective is not finite at the starting point");

  MinimizeResult result{x0, f0, 0, 1, false};
  Rng rng(opts.seed);
  std::vector<double> start = x0;
  for (std::size_t r = 0; r <= opts.restarts; ++r) {
    if (r > 0) {
      for (std::size_t j = 0; j < x0.size(); ++j) start[j] = x0[j] * (1.0 + 0.2 * (2.0 * rng.uniform() - 1.0));
      if (!std::isfinite(objective(start))) continue;
    }
    const auto run = detail::nelder_mead_once(objective, start, opts);
    result.iterations += run.iterations;
    result.evaluations += run.evaluations;
    if (run.f < result.f || (r == 0 && run.f <= result.f)) {
      result.x = run.x;
      result.f = run.f;
      result.converged = run.converged;
    }
  }
  // Polish from the best vertex: a fresh simplex there removes stagnation
  // that a collapsed simplex can leave behind.
  const auto polish = detail::nelder_mead_once(objective, result.x, opts);
  result.iterations += polish.iterations;
  result.evaluations += polish.evaluations;
  if (polish.f < result.f) {
    result.x = polish.x;
    result.f = polish.f;
    result.converged = polish.converged;
  }
  return result;
}

}  // namespace adssm
