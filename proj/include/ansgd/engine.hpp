#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ansgd/errors.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/rng.hpp"
#include "ansgd/schedule.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

/// Iterate pair (x_t, v_t) of the accelerated method plus its sample stream.
struct OptimizerState {
  std::vector<double> x;
  std::vector<double> v;
  std::uint64_t t = 0;
  Rng rng;

  /// x_0 = v_0 = 0.
  static OptimizerState zeros(std::size_t dim, std::uint64_t seed) {
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0, Rng(seed)};
  }
};

/// Quantities produced inside one step, exposed for inspection.
struct StepTrace {
  StepCoefficients coeffs{};
  std::vector<double> y;
  std::vector<double> grad;
  const Sample* sample = nullptr;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
  for (double d : v)
    if (!std::isfinite(d)) return false;
  return true;
}

}  // namespace detail

/// One iteration:
///   y = [(1-a)(mu+theta) x + a theta v] / [mu(1-a) + theta]
///   draw xi, set gamma <- gamma_{t+1}
///   G = grad f̂(y; xi, gamma) + grad g(y)
///   x <- y - eta G
///   v <- [theta v + mu y - G] / (mu + theta)
inline void step(OptimizerState& state, const Schedule& sched, LossFamily family, const Regularizer& reg,
                 const Dataset& ds, StepTrace* trace = nullptr) {
  const std::size_t dim = state.x.size();
  if (dim != ds.dim || state.v.size() != dim) throw ArgumentError("optimizer state dimension does not match dataset");

  const StepCoefficients c = coefficients(sched, state.t);
  const double mu = sched.mu;
  const double a = c.alpha;

  std::vector<double> y(dim);
  const double wx = (1.0 - a) * (mu + c.theta);
  const double wv = a * c.theta;
  const double denom = mu * (1.0 - a) + c.theta;
  for (std::size_t i = 0; i < dim; ++i) y[i] = (wx * state.x[i] + wv * state.v[i]) / denom;

  const Sample& sample = draw(ds, state.rng);
  const SmoothedLoss loss(family, c.gamma_next);
  const double coef = gradient_coefficient(loss, y, sample);

  std::vector<double> g(dim);
  const double lambda = reg.lambda();
  for (std::size_t i = 0; i < dim; ++i) g[i] = lambda * y[i];
  sample.features.axpy_into(coef, g);

  const double inv = 1.0 / (mu + c.theta);
  for (std::size_t i = 0; i < dim; ++i) {
    state.x[i] = y[i] - c.eta * g[i];
    state.v[i] = (c.theta * state.v[i] + mu * y[i] - g[i]) * inv;
  }
  ++state.t;

  if (!detail::all_finite(state.x) || !detail::all_finite(state.v))
    throw DivergenceError(state.t, "non-finite iterate; check omega and lambda");

  if (trace) {
    trace->coeffs = c;
    trace->y = std::move(y);
    trace->grad = std::move(g);
    trace->sample = &sample;
  }
}

/// Bundles the fixed ingredients of a run so callers only advance it.
class AnsgdOptimizer {
 public:
  AnsgdOptimizer(Schedule sched, LossFamily family, Regularizer reg, const Dataset& ds, std::uint64_t seed)
      : sched_(sched), family_(family), reg_(reg), ds_(&ds), state_(OptimizerState::zeros(ds.dim, seed)) {
    sched_.validate();
  }

  void step() { ansgd::step(state_, sched_, family_, reg_, *ds_); }

  void run(std::uint64_t iterations) {
    for (std::uint64_t i = 0; i < iterations; ++i) step();
  }

  const OptimizerState& state() const noexcept { return state_; }
  std::span<const double> solution() const noexcept { return state_.x; }
  std::uint64_t iteration() const noexcept { return state_.t; }

 private:
  Schedule sched_;
  LossFamily family_;
  Regularizer reg_;
  const Dataset* ds_;
  OptimizerState state_;
};

}  // namespace ansgd
