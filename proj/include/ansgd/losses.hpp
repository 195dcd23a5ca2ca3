#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "ansgd/errors.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

/// Nonsmooth loss families with a closed-form max representation
///   f(x; s, l) = max_{u in U} u * r(x)
/// where r is the residual: r = 1 - l sᵀx, U = [0, 1] for the hinge loss and
/// r = l - sᵀx, U = [-1, 1] for the absolute loss.
enum class LossFamily { hinge, absolute };

constexpr std::string_view to_string(LossFamily f) { return f == LossFamily::hinge ? "hinge" : "absolute"; }

/// max of the prox-function u²/2 over U; 1/2 for both families.
inline constexpr double prox_diameter = 0.5;

inline double residual(LossFamily family, double prediction, double label) noexcept {
  return family == LossFamily::hinge ? 1.0 - label * prediction : label - prediction;
}

/// d(residual)/d(prediction).
inline double residual_slope(LossFamily family, double label) noexcept {
  return family == LossFamily::hinge ? -label : -1.0;
}

/// Smoothed surrogate max_{u in U} [u r - gamma u²/2] of a nonsmooth loss.
class SmoothedLoss {
 public:
  SmoothedLoss(LossFamily family, double gamma) : family_(family) { set_gamma(gamma); }

  LossFamily family() const noexcept { return family_; }
  double gamma() const noexcept { return gamma_; }

  void set_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError("smoothness parameter must be positive");
    gamma_ = gamma;
  }

 private:
  LossFamily family_;
  double gamma_ = 1.0;
};

/// Exact argmax of u r - gamma u²/2 over U.
inline double maximizer_u(const SmoothedLoss& loss, double r) noexcept {
  const double lo = loss.family() == LossFamily::hinge ? 0.0 : -1.0;
  return std::clamp(r / loss.gamma(), lo, 1.0);
}

/// Piecewise closed form of the smoothed loss as a function of the residual.
inline double smoothed_value(const SmoothedLoss& loss, double r) noexcept {
  const double g = loss.gamma();
  if (loss.family() == LossFamily::hinge) {
    if (r <= 0.0) return 0.0;
    if (r <= g) return r * r / (2.0 * g);
    return r - g / 2.0;
  }
  if (r >= g) return r - g / 2.0;
  if (r >= -g) return r * r / (2.0 * g);
  return -r - g / 2.0;
}

inline double exact_value(LossFamily family, double r) noexcept {
  return family == LossFamily::hinge ? std::max(0.0, r) : std::abs(r);
}

inline double loss_value(const SmoothedLoss& loss, std::span<const double> x, const Sample& sample) {
  return smoothed_value(loss, residual(loss.family(), sample.features.dot(x), sample.label));
}

/// Scalar c with grad f̂(x) = c·s. By Danskin, c = u*·dr/d(sᵀx).
inline double gradient_coefficient(const SmoothedLoss& loss, std::span<const double> x, const Sample& sample) {
  const double r = residual(loss.family(), sample.features.dot(x), sample.label);
  return maximizer_u(loss, r) * residual_slope(loss.family(), sample.label);
}

/// Gradient of the smoothed loss, supported on the sample's nonzeros.
inline SparseVector loss_gradient(const SmoothedLoss& loss, std::span<const double> x, const Sample& sample) {
  return sample.features.scaled(gradient_coefficient(loss, x, sample));
}

/// Lipschitz constant of the smoothed gradient for one sample: ||s||² l² / gamma.
inline double gradient_lipschitz(const SmoothedLoss& loss, const Sample& sample) noexcept {
  const double slope = residual_slope(loss.family(), sample.label);
  return sample.features.norm_sq() * slope * slope / loss.gamma();
}

inline double exact_loss(LossFamily family, std::span<const double> x, const Sample& sample) {
  return exact_value(family, residual(family, sample.features.dot(x), sample.label));
}

/// Scalar c with subgradient c·s. Kinks resolve to 0: hinge at margin 1,
/// absolute at residual 0.
inline double subgradient_coefficient(LossFamily family, std::span<const double> x, const Sample& sample) {
  const double r = residual(family, sample.features.dot(x), sample.label);
  double u = 0.0;
  if (family == LossFamily::hinge)
    u = r > 0.0 ? 1.0 : 0.0;
  else
    u = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  return u * residual_slope(family, sample.label);
}

inline SparseVector exact_subgradient(LossFamily family, std::span<const double> x, const Sample& sample) {
  return sample.features.scaled(subgradient_coefficient(family, x, sample));
}

/// g(x) = (lambda/2)||x||².
class Regularizer {
 public:
  explicit Regularizer(double lambda = 0.0) : lambda_(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("regularization weight must be >= 0");
  }

  double lambda() const noexcept { return lambda_; }
  double lipschitz() const noexcept { return lambda_; }
  double strong_convexity(bool strongly_convex_mode) const noexcept { return strongly_convex_mode ? lambda_ : 0.0; }

  double value(std::span<const double> x) const noexcept {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return 0.5 * lambda_ * s;
  }

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(x.begin(), x.end());
    for (double& gi : g) gi *= lambda_;
    return g;
  }

 private:
  double lambda_;
};

/// Exact composite objective on a dataset: mean exact loss + (lambda/2)||x||².
inline double composite_objective(const Dataset& ds, LossFamily family, const Regularizer& reg,
                                  std::span<const double> x) {
  double sum = 0.0;
  for (const auto& s : ds.samples) sum += exact_loss(family, x, s);
  return sum / static_cast<double>(ds.size()) + reg.value(x);
}

/// Fraction of samples with sign(sᵀx) == label, sign(0) counted as +1.
inline double accuracy(const Dataset& ds, std::span<const double> x) {
  std::size_t hits = 0;
  for (const auto& s : ds.samples) {
    const double pred = s.features.dot(x) >= 0.0 ? 1.0 : -1.0;
    if (pred == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.size());
}

}  // namespace ansgd
