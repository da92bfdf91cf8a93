#pragma once

// Closed-form altitude models: first-order exponential relaxation for power
// and entropy, logistic activation for sparsity, and the 10/50/90 % transition
// heights read off the fitted curves.

#include <array>
#include <cmath>
#include <optional>

#include "adssm/errors.hpp"

namespace adssm {

/// X(h) = x_inf - (x_inf - x_zero) * exp(-h / tau)
struct ExpModelParams {
  double x_inf = 0.0;
  double x_zero = 0.0;
  double tau = 1.0;

  [[nodiscard]] bool valid() const {
    return std::isfinite(x_inf) && std::isfinite(x_zero) && std::isfinite(tau) && tau > 0.0;
  }
};

/// S(h) = 1 / (1 + exp(-k (h - h_s)))
struct LogisticModelParams {
  double k = 1.0;
  double h_s = 0.0;

  [[nodiscard]] bool valid() const { return std::isfinite(k) && std::isfinite(h_s) && k > 0.0; }
};

struct TransitionHeights {
  double h10 = 0.0;
  double h50 = 0.0;
  double h90 = 0.0;
};

using TransitionFractions = std::array<double, 3>;
inline constexpr TransitionFractions kDefaultTransitionFractions{0.1, 0.5, 0.9};

inline void validate_fractions(const TransitionFractions& q) {
  for (double v : q)
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("transition fractions must lie in (0, 1)");
  if (!(q[0] <= q[1] && q[1] <= q[2])) throw ConfigError("transition fractions must be non-decreasing");
}

inline double exp_eval(const ExpModelParams& p, double h) {
  return p.x_inf - (p.x_inf - p.x_zero) * std::exp(-h / p.tau);
}

inline double exp_derivative(const ExpModelParams& p, double h) {
  return (p.x_inf - p.x_zero) / p.tau * std::exp(-h / p.tau);
}

/// dX/dh - (x_inf - X(h)) / tau; zero for every h when X is the closed form.
inline double exp_ode_residual(const ExpModelParams& p, double h) {
  return exp_derivative(p, h) - (p.x_inf - exp_eval(p, h)) / p.tau;
}

/// Branch split at zero so neither exp() call can overflow.
inline double logistic_eval(const LogisticModelParams& p, double h) {
  const double z = p.k * (h - p.h_s);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// h_q = -tau * ln(1 - q). Empty when the model has no change to traverse.
inline std::optional<TransitionHeights> transition_heights_exp(const ExpModelParams& p,
                                                               const TransitionFractions& q = kDefaultTransitionFractions) {
  validate_fractions(q);
  if (p.x_inf == p.x_zero || !p.valid()) return std::nullopt;
  auto at = [&](double f) { return -p.tau * std::log1p(-f); };
  return TransitionHeights{at(q[0]), at(q[1]), at(q[2])};
}

/// Heights where S reaches S(0) + q (1 - S(0)); the low-altitude reference is
/// the curve at ground level, not its h -> -inf limit.
inline TransitionHeights transition_heights_logistic(const LogisticModelParams& p,
                                                     const TransitionFractions& q = kDefaultTransitionFractions) {
  validate_fractions(q);
  if (!p.valid()) throw ConfigError("logistic parameters invalid");
  const double s0 = logistic_eval(p, 0.0);
  auto at = [&](double f) {
    const double target = s0 + f * (1.0 - s0);
    if (target <= s0) return 0.0;
    // ln(1/s - 1) = ln((1 - s) / s), with 1 - s formed without cancellation.
    const double one_minus = (1.0 - f) * (1.0 - s0);
    const double h = p.h_s - std::log(one_minus / target) / p.k;
    return h < 0.0 ? 0.0 : h;
  };
  return {at(q[0]), at(q[1]), at(q[2])};
}

}  // namespace adssm
