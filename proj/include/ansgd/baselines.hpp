#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ansgd/engine.hpp"
#include "ansgd/errors.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/rng.hpp"
#include "ansgd/schedule.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

enum class BaselineVariant { sgd, averaged_sgd };

/// Subgradient descent on the exact composite objective, optionally reporting
/// the Polyak average of the iterates x_1..x_t.
struct BaselineState {
  std::vector<double> x;
  std::vector<double> x_avg;
  std::uint64_t t = 0;
  Rng rng;
  BaselineVariant variant = BaselineVariant::sgd;
  Mode mode = Mode::convex;
  double omega = 1.0;
  double mu = 0.0;

  static BaselineState zeros(std::size_t dim, std::uint64_t seed, BaselineVariant variant, Mode mode, double omega,
                             double mu) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
    if (mode == Mode::strongly_convex && !(mu > 0.0)) throw ConfigError("strongly convex baseline requires mu > 0");
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0, Rng(seed), variant, mode, omega,
            mode == Mode::convex ? 0.0 : mu};
  }
};

/// Stepsize for update number t (t >= 1):
///   SGD / averaged SGD, convex:   omega / sqrt(t)
///   SGD, strongly convex:         1 / (mu (t + omega))
///   averaged SGD, strongly convex: 1 / (omega (1 + mu t / omega)^(3/4))
inline double baseline_stepsize(BaselineVariant variant, Mode mode, double omega, double mu, std::uint64_t t) {
  if (t == 0) throw ArgumentError("baseline stepsizes are indexed from t = 1");
  const auto td = static_cast<double>(t);
  if (mode == Mode::convex) return omega / std::sqrt(td);
  if (variant == BaselineVariant::sgd) return 1.0 / (mu * (td + omega));
  return 1.0 / (omega * std::pow(1.0 + mu * td / omega, 0.75));
}

inline void baseline_step(BaselineState& state, const Regularizer& reg, LossFamily family, const Dataset& ds) {
  const std::size_t dim = state.x.size();
  if (dim != ds.dim) throw ArgumentError("baseline state dimension does not match dataset");

  const std::uint64_t t = state.t + 1;
  const double eta = baseline_stepsize(state.variant, state.mode, state.omega, state.mu, t);
  const Sample& sample = draw(ds, state.rng);
  const double coef = subgradient_coefficient(family, state.x, sample);

  // x <- x - eta (coef s + lambda x)
  const double shrink = 1.0 - eta * reg.lambda();
  for (double& xi : state.x) xi *= shrink;
  sample.features.axpy_into(-eta * coef, state.x);
  state.t = t;

  if (!detail::all_finite(state.x)) throw DivergenceError(t, "non-finite baseline iterate; check omega");

  if (state.variant == BaselineVariant::averaged_sgd) {
    const double w = 1.0 / static_cast<double>(t);
    for (std::size_t i = 0; i < dim; ++i) state.x_avg[i] += (state.x[i] - state.x_avg[i]) * w;
  }
}

/// The point reported for evaluation: x for SGD, the running average for
/// averaged SGD.
inline std::span<const double> evaluation_point(const BaselineState& state) {
  if (state.t == 0) throw ArgumentError("no iterate produced yet");
  return state.variant == BaselineVariant::averaged_sgd ? std::span<const double>(state.x_avg)
                                                        : std::span<const double>(state.x);
}

}  // namespace ansgd
