#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ansgd/errors.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

struct ReferenceSolution {
  std::vector<double> x;
  double phi_star = 0.0;
  std::uint64_t iterations = 0;
};

/// Finite-sum objective sum_i w_i loss(x; xi_i) + (lambda/2)||x||² with
/// nonnegative weights summing to 1.
struct WeightedProblem {
  std::vector<const Sample*> samples;
  std::vector<double> weights;
  std::size_t dim = 0;
  LossFamily family = LossFamily::hinge;
  double lambda = 0.0;

  static WeightedProblem uniform(const Dataset& ds, LossFamily family, double lambda) {
    WeightedProblem p;
    p.dim = ds.dim;
    p.family = family;
    p.lambda = lambda;
    const double w = 1.0 / static_cast<double>(ds.size());
    for (const auto& s : ds.samples) {
      p.samples.push_back(&s);
      p.weights.push_back(w);
    }
    return p;
  }

  double exact_objective(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += weights[i] * exact_loss(family, x, *samples[i]);
    return sum + Regularizer(lambda).value(x);
  }

  double smoothed_objective(const SmoothedLoss& loss, std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += weights[i] * loss_value(loss, x, *samples[i]);
    return sum + Regularizer(lambda).value(x);
  }

  void smoothed_gradient(const SmoothedLoss& loss, std::span<const double> x, std::span<double> g) const {
    for (std::size_t j = 0; j < dim; ++j) g[j] = lambda * x[j];
    for (std::size_t i = 0; i < samples.size(); ++i)
      samples[i]->features.axpy_into(weights[i] * gradient_coefficient(loss, x, *samples[i]), g);
  }

  void exact_subgradient(std::span<const double> x, std::span<double> g) const {
    for (std::size_t j = 0; j < dim; ++j) g[j] = lambda * x[j];
    for (std::size_t i = 0; i < samples.size(); ++i)
      samples[i]->features.axpy_into(weights[i] * subgradient_coefficient(family, x, *samples[i]), g);
  }

  /// Lipschitz constant of the smoothed gradient.
  double smoothed_lipschitz(const SmoothedLoss& loss) const {
    double l = lambda;
    for (std::size_t i = 0; i < samples.size(); ++i) l += weights[i] * gradient_lipschitz(loss, *samples[i]);
    return l;
  }
};

struct ReferenceOptions {
  double gamma_start = 1.0;
  double gamma_final = 1e-6;
  double gamma_factor = 0.1;
  double grad_tol = 1e-10;
  double rel_tol = 1e-9;
  std::uint64_t polish_steps = 2000;
};

namespace detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double d : v) s += d * d;
  return std::sqrt(s);
}

// Accelerated full-gradient descent with gradient-based momentum restart on
// one smoothed stage. Returns true once the gradient norm falls below
// grad_tol or consecutive objective checks agree to rel_tol.
inline bool minimize_smoothed(const WeightedProblem& p, const SmoothedLoss& loss, std::vector<double>& x,
                              std::uint64_t max_iter, double grad_tol, double rel_tol, std::uint64_t& used) {
  const std::size_t d = p.dim;
  const double step = 1.0 / p.smoothed_lipschitz(loss);
  std::vector<double> y = x, x_prev = x, g(d), x_new(d);
  double tk = 1.0;
  double last_obj = p.smoothed_objective(loss, x);
  constexpr std::uint64_t check_every = 100;
  for (std::uint64_t k = 1; k <= max_iter; ++k) {
    ++used;
    p.smoothed_gradient(loss, y, g);
    if (norm2(g) <= grad_tol) {
      x = y;
      return true;
    }
    for (std::size_t j = 0; j < d; ++j) x_new[j] = y[j] - step * g[j];
    double restart = 0.0;
    for (std::size_t j = 0; j < d; ++j) restart += g[j] * (x_new[j] - x[j]);
    if (restart > 0.0) tk = 1.0;
    const double tk_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const double beta = (tk - 1.0) / tk_next;
    tk = tk_next;
    x_prev.swap(x);
    x.swap(x_new);
    for (std::size_t j = 0; j < d; ++j) y[j] = x[j] + beta * (x[j] - x_prev[j]);
    if (restart > 0.0) y = x;

    if (k % check_every == 0) {
      const double obj = p.smoothed_objective(loss, x);
      // Changes at the level of accumulated rounding count as converged.
      if (std::abs(obj - last_obj) <= std::max(rel_tol * std::max(1.0, std::abs(obj)), 1e-15)) return true;
      last_obj = obj;
    }
  }
  return false;
}

}  // namespace detail

/// High-accuracy minimizer of the exact composite objective. Runs
/// accelerated full-gradient descent on the smoothed objective while the
/// smoothness parameter is annealed geometrically down to gamma_final, then
/// polishes with averaged subgradient steps on the exact objective and keeps
/// whichever point has the lower exact objective.
///
/// Throws OracleError when the final smoothed stage has not converged within
/// `budget` total gradient evaluations.
inline ReferenceSolution solve_reference(const WeightedProblem& p, std::uint64_t budget,
                                         const ReferenceOptions& opt = {}) {
  if (p.samples.empty()) throw ArgumentError("reference solve on an empty problem");
  if (!(p.lambda >= 0.0)) throw ArgumentError("lambda must be >= 0");
  ReferenceSolution sol;
  sol.x.assign(p.dim, 0.0);

  std::uint64_t used = 0;
  bool converged = false;
  for (double gamma = opt.gamma_start;; gamma *= opt.gamma_factor) {
    const bool last = gamma <= opt.gamma_final * (1.0 + 1e-9);
    if (last) gamma = opt.gamma_final;
    const SmoothedLoss loss(p.family, gamma);
    if (used >= budget) break;
    const std::uint64_t remaining = budget - used;
    // Intermediate stages only warm-start the next one.
    const double tol = last ? opt.grad_tol : std::max(opt.grad_tol, 1e-3 * gamma);
    converged = detail::minimize_smoothed(p, loss, sol.x, remaining, tol, last ? opt.rel_tol * 1e-3 : opt.rel_tol,
                                          used);
    if (last) break;
  }
  if (!converged)
    throw OracleError("reference solver did not converge within " + std::to_string(budget) + " iterations");

  double best = p.exact_objective(sol.x);

  // Averaged subgradient polish from the smoothed solution.
  std::vector<double> x = sol.x, avg = sol.x, g(p.dim);
  p.exact_subgradient(x, g);
  const double g0 = std::max(1.0, detail::norm2(g));
  const double eta0 = opt.gamma_final / g0;
  for (std::uint64_t k = 1; k <= opt.polish_steps; ++k) {
    p.exact_subgradient(x, g);
    const double eta = eta0 / std::sqrt(static_cast<double>(k));
    for (std::size_t j = 0; j < p.dim; ++j) {
      x[j] -= eta * g[j];
      avg[j] += (x[j] - avg[j]) / static_cast<double>(k + 1);
    }
  }
  const double polished = p.exact_objective(avg);
  if (polished < best) {
    best = polished;
    sol.x = std::move(avg);
  }
  sol.phi_star = best;
  sol.iterations = used;
  return sol;
}

inline ReferenceSolution solve_reference(const Dataset& ds, LossFamily family, double lambda,
                                         std::uint64_t budget, const ReferenceOptions& opt = {}) {
  ds.validate();
  return solve_reference(WeightedProblem::uniform(ds, family, lambda), budget, opt);
}

}  // namespace ansgd
