#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "ansgd/errors.hpp"

namespace ansgd {

enum class Mode { convex, strongly_convex };

constexpr const char* to_string(Mode m) { return m == Mode::convex ? "convex" : "strongly_convex"; }

/// Per-iteration coefficients consumed by one accelerated step.
struct StepCoefficients {
  double alpha;       // interpolation weight, in [0, 1]
  double gamma_next;  // smoothness parameter for the sample drawn this step
  double theta;       // prox weight on the auxiliary sequence
  double eta;         // stepsize for the primary sequence
};

/// Parameter schedule for the accelerated method.
///
/// Convex (mu = 0):
///   alpha_t = 2/(t+2), gamma_{t+1} = alpha_t,
///   theta_t = L_g alpha_t + omega/sqrt(alpha_t) + A/zeta, eta_t = alpha_t/theta_t.
/// Strongly convex (mu > 0):
///   alpha_t = min(1, 2/(t+1)), gamma_{t+1} = alpha_t,
///   theta_t = L_g alpha_t + mu/(2 alpha_t) + A/(omega zeta) - mu,
///   eta_t = alpha_t/(mu + theta_t).
/// Here A is an estimate of E||A_xi||², for linear models the mean squared
/// feature norm.
struct Schedule {
  Mode mode = Mode::convex;
  double lipschitz_g = 0.0;  // L_g
  double mu = 0.0;
  double a_norm_sq = 0.0;
  double omega = 1.0;
  double zeta = 1.0;

  static Schedule convex(double lipschitz_g, double a_norm_sq, double omega) {
    Schedule s{Mode::convex, lipschitz_g, 0.0, a_norm_sq, omega, 1.0};
    s.validate();
    return s;
  }

  static Schedule strongly_convex(double lipschitz_g, double mu, double a_norm_sq, double omega) {
    Schedule s{Mode::strongly_convex, lipschitz_g, mu, a_norm_sq, omega, 1.0};
    s.validate();
    return s;
  }

  /// Parameter-free strongly convex variant: the variance term
  /// A/(omega zeta) is pinned to 1.
  static Schedule strongly_convex_default(double lipschitz_g, double mu) {
    return strongly_convex(lipschitz_g, mu, 1.0, 1.0);
  }

  /// Checks the mode/mu contract and, in strongly convex mode, that theta_t
  /// stays positive for every t.
  void validate() const;
};

inline double schedule_alpha(Mode mode, std::uint64_t t) noexcept {
  const auto td = static_cast<double>(t);
  return mode == Mode::convex ? 2.0 / (td + 2.0) : std::min(1.0, 2.0 / (td + 1.0));
}

namespace detail {

inline double strong_theta(const Schedule& s, double alpha) noexcept {
  return s.lipschitz_g * alpha + s.mu / (2.0 * alpha) + s.a_norm_sq / (s.omega * s.zeta) - s.mu;
}

inline std::string describe(const Schedule& s) {
  std::ostringstream os;
  os << "L_g=" << s.lipschitz_g << ", mu=" << s.mu << ", A=" << s.a_norm_sq << ", omega=" << s.omega;
  return os.str();
}

}  // namespace detail

inline void Schedule::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(lipschitz_g) || !finite_nonneg(mu) || !finite_nonneg(a_norm_sq))
    throw ConfigError("schedule parameters must be finite and nonnegative (" + detail::describe(*this) + ")");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  if (!(zeta > 0.0)) throw ConfigError("zeta must be positive");
  if (mode == Mode::convex) {
    if (mu != 0.0) throw ConfigError("convex schedule requires mu = 0");
    return;
  }
  if (!(mu > 0.0)) throw ConfigError("strongly convex schedule requires mu > 0");

  // theta(alpha) = L_g alpha + mu/(2 alpha) + A/(omega zeta) - mu. When its
  // continuous minimizer alpha* = sqrt(mu/(2 L_g)) lies below 1 we have
  // mu < 2 L_g, so theta(alpha*) = sqrt(2 L_g mu) - mu + A/(omega zeta) > 0.
  // Otherwise theta decreases on (0, 1], and alpha_0 = 1 is the worst case.
  const double worst = detail::strong_theta(*this, 1.0);
  if (!(worst > 0.0))
    throw ConfigError("strongly convex schedule yields theta_t <= 0 (" + detail::describe(*this) +
                      "); increase A/omega or reduce mu");
}

inline StepCoefficients coefficients(const Schedule& s, std::uint64_t t) {
  StepCoefficients c{};
  c.alpha = schedule_alpha(s.mode, t);
  c.gamma_next = c.alpha;
  if (s.mode == Mode::convex) {
    c.theta = s.lipschitz_g * c.alpha + s.omega / std::sqrt(c.alpha) + s.a_norm_sq / s.zeta;
    if (!(c.theta > 0.0)) throw ConfigError("theta_t <= 0 (" + detail::describe(s) + ")");
    c.eta = c.alpha / c.theta;
  } else {
    c.theta = detail::strong_theta(s, c.alpha);
    if (!(c.theta > 0.0))
      throw ConfigError("theta_t <= 0 at t=" + std::to_string(t) + " (" + detail::describe(s) + ")");
    c.eta = c.alpha / (s.mu + c.theta);
  }
  return c;
}

/// theta_t with the variance term set to 1: L_g alpha_t + mu/(2 alpha_t) + 1 - mu.
inline double theta_default_strongly_convex(const Schedule& s, std::uint64_t t) {
  if (s.mode != Mode::strongly_convex) throw ArgumentError("default theta needs strongly convex mode");
  const double alpha = schedule_alpha(s.mode, t);
  const double theta = s.lipschitz_g * alpha + s.mu / (2.0 * alpha) + 1.0 - s.mu;
  if (!(theta > 0.0)) throw ConfigError("default theta_t <= 0 at t=" + std::to_string(t));
  return theta;
}

/// Iteration index after which the A-dependent error term decays as 1/t²:
/// C = max{4A/(zeta mu), 2 (L_g/mu)^(1/3)}.
inline double constant_C(const Schedule& s) {
  if (!(s.mu > 0.0)) throw ArgumentError("constant C requires mu > 0");
  return std::max(4.0 * s.a_norm_sq / (s.zeta * s.mu), 2.0 * std::cbrt(s.lipschitz_g / s.mu));
}

}  // namespace ansgd
