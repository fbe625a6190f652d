#pragma once

#include <cstdint>
#include <stdexcept>

#include "iwlearn/losses.hpp"
#include "iwlearn/scales.hpp"

namespace iwlearn {

enum class OdeMethod { euler, rk4 };

struct IntegratorConfig {
  std::int64_t substeps = 1000000;
  OdeMethod method = OdeMethod::euler;
};

// Exact cumulative scale of h explicit gradient steps on one example at a
// fixed learning rate: s(h+1) = s(h) + eta * l'(p - s(h)*xx).
inline double recursive_scale(const Loss& loss, double p, double y, double xx, double eta, std::int64_t h) {
  if (h < 0) throw std::invalid_argument("recursive_scale: h must be >= 0");
  double s = 0.0;
  for (std::int64_t i = 0; i < h; ++i) {
    s += eta * loss_derivative(loss, p - s * xx, y);
  }
  return s;
}

namespace detail {

// Location of the derivative discontinuity in prediction space, if any.
// Hinge: y*q = 1; quantile: q = y. Used only to stop an Euler substep exactly
// on the corner instead of stepping past it.
inline bool loss_corner(const Loss& loss, double y, double* corner) {
  switch (loss.kind) {
    case LossKind::hinge:
      *corner = 1.0 / y;
      return true;
    case LossKind::quantile:
      *corner = y;
      return true;
    default:
      return false;
  }
}

}  // namespace detail

// Numerically integrates s'(k) = l'(p - s(k)*xx) from 0 to in.mass. This is
// the ground truth the closed forms are checked against. Piecewise-linear
// losses always use Euler with the substep clamped at the corner (Runge-Kutta
// order claims do not survive a derivative discontinuity).
inline double integrate_scale(const Loss& loss, const ScaleInput& in, const IntegratorConfig& cfg) {
  if (cfg.substeps < 1) throw std::invalid_argument("integrate_scale: substeps must be >= 1");
  validate_scale_input(loss, in);
  const double p = in.prediction;
  const double y = in.label;
  const double xx = in.xx;
  if (in.mass == 0.0) return 0.0;
  const double dk = in.mass / static_cast<double>(cfg.substeps);

  double corner;
  const bool has_corner = detail::loss_corner(loss, y, &corner);

  double s = 0.0;
  if (cfg.method == OdeMethod::euler || has_corner) {
    for (std::int64_t i = 0; i < cfg.substeps; ++i) {
      const double d = loss_derivative(loss, p - s * xx, y);
      double next = s + dk * d;
      if (has_corner) {
        const double q_now = p - s * xx;
        const double q_next = p - next * xx;
        if ((q_now - corner) * (q_next - corner) < 0.0) next = (p - corner) / xx;
      }
      s = next;
    }
    return s;
  }

  // classic RK4 on the autonomous scalar ODE
  for (std::int64_t i = 0; i < cfg.substeps; ++i) {
    const double k1 = loss_derivative(loss, p - s * xx, y);
    const double k2 = loss_derivative(loss, p - (s + 0.5 * dk * k1) * xx, y);
    const double k3 = loss_derivative(loss, p - (s + 0.5 * dk * k2) * xx, y);
    const double k4 = loss_derivative(loss, p - (s + dk * k3) * xx, y);
    s += dk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

}  // namespace iwlearn
