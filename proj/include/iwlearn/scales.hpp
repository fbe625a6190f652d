#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iwlearn/errors.hpp"
#include "iwlearn/lambert_w.hpp"
#include "iwlearn/losses.hpp"

namespace iwlearn {

// Inputs of a single scale computation. `mass` is the effective mass k: h*eta
// for a constant learning rate, or the integral of the rate over h example
// presentations for a decaying schedule. The weight update applied by callers
// is w <- w - s * x, so the prediction moves from p to p - s * xx.
struct ScaleInput {
  double prediction = 0.0;  // p = w.x before the update
  double label = 0.0;       // y
  double xx = 1.0;          // x.x
  double mass = 0.0;        // k >= 0
};

inline void validate_scale_input(const Loss& loss, const ScaleInput& in) {
  validate_label(loss, in.label);
  if (!(in.xx > 0.0) || !std::isfinite(in.xx)) throw std::invalid_argument("ScaleInput: xx must be positive and finite");
  if (!(in.mass >= 0.0) || !std::isfinite(in.mass)) throw std::invalid_argument("ScaleInput: mass must be non-negative and finite");
  if (!std::isfinite(in.prediction)) throw std::invalid_argument("ScaleInput: prediction must be finite");
}

// Largest effective mass the logarithmic loss may consume before the updated
// prediction reaches the clip point (eps for y=0, 1-eps for y=1). Returns
// min(in.mass, that cap); 0 when the prediction already sits at or past the
// clip point.
inline double clip_mass_for_log_loss(const ScaleInput& in, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("clip eps must lie in (0, 0.5)");
  const double p = in.prediction;
  double cap;
  if (in.label == 1.0) {
    // updated prediction is sqrt(p^2 + 2 k xx); cap where it equals 1-eps
    const double lim = 1.0 - eps;
    cap = (lim * lim - p * p) / (2.0 * in.xx);
  } else {
    // updated prediction is 1 - sqrt((1-p)^2 + 2 k xx); cap where it equals eps
    const double lim = 1.0 - eps;
    const double om = 1.0 - p;
    cap = (lim * lim - om * om) / (2.0 * in.xx);
  }
  if (!(cap > 0.0)) return 0.0;
  return std::min(in.mass, cap);
}

// Scale for the {0,1} logarithmic loss through the link sigma=(1+tanh p)/2.
// Solving the continuous-descent ODE for this pair gives, with
// A1 = e^{2p}+2p+4k*xx and A0 = e^{-2p}-2p+4k*xx,
//   y=1:  p' = +log(W(e^{A1}))/2      y=0:  p' = -log(W(e^{A0}))/2
// and s = (p - p')/xx. Both exponents are consumed in log space.
inline double tanh_link_log_scale(const ScaleInput& in, double y) {
  if (y != 0.0 && y != 1.0) throw std::invalid_argument("tanh-link loss requires labels in {0,1}");
  if (in.mass == 0.0) return 0.0;
  const double p = in.prediction;
  const double v = y == 1.0 ? 2.0 * p : -2.0 * p;
  if (v > 700.0) {
    // e^v overflows; the gradient 2e^{-v} underflows to zero anyway.
    Loss l = Loss::logarithmic_tanh_link();
    return in.mass * loss_derivative(l, p, y);
  }
  const double a = std::exp(v) + v + 4.0 * in.mass * in.xx;
  const double q_signed = 0.5 * std::log(lambert_w_exp(a));  // = y==1 ? p' : -p'
  const double p_new = y == 1.0 ? q_signed : -q_signed;
  return (p - p_new) / in.xx;
}

// Closed-form importance-invariant scale: the exact limit of presenting the
// example infinitely often with an infinitesimal rate, total mass k. Always
// satisfies s(0)=0 and the a+b composition identity.
inline double invariant_scale(const Loss& loss, const ScaleInput& in) {
  validate_scale_input(loss, in);
  if (in.mass == 0.0) return 0.0;
  const double p = in.prediction;
  const double y = in.label;
  const double xx = in.xx;
  const double k = in.mass;
  switch (loss.kind) {
    case LossKind::squared:
      // residual decays by e^{-k xx}
      return (p - y) / xx * -std::expm1(-k * xx);
    case LossKind::logistic: {
      const double v = y * p;
      if (v > 700.0) return k * loss_derivative(loss, p, y);  // gradient underflows
      // ODE solution: y*p' = log W(e^{k xx + v + e^v})
      const double a = k * xx + v + std::exp(v);
      return y * (v - std::log(lambert_w_exp(a))) / xx;
    }
    case LossKind::exponential: {
      const double v = y * p;
      // ODE solution: e^{y p'} = k xx + e^{v}
      return y * (v - detail::logaddexp(v, std::log(k * xx))) / xx;
    }
    case LossKind::logarithmic: {
      const double keff = clip_mass_for_log_loss(in, loss.log_clip_eps);
      if (keff == 0.0) return 0.0;
      if (y == 1.0) return (p - std::sqrt(p * p + 2.0 * keff * xx)) / xx;
      const double om = 1.0 - p;
      return (p - 1.0 + std::sqrt(om * om + 2.0 * keff * xx)) / xx;
    }
    case LossKind::hellinger: {
      if (y == 1.0) {
        const double t = std::cbrt(12.0 * k * xx + 8.0 * p * std::sqrt(std::max(p, 0.0)));
        return (p - 0.25 * t * t) / xx;
      }
      const double om = 1.0 - p;
      const double t = std::cbrt(12.0 * k * xx + 8.0 * om * std::sqrt(std::max(om, 0.0)));
      return (p - 1.0 + 0.25 * t * t) / xx;
    }
    case LossKind::hinge: {
      // step just far enough to land on the hinge, never beyond
      const double cap = std::max(0.0, (1.0 - y * p) / xx);
      return -y * std::min(k, cap);
    }
    case LossKind::quantile: {
      const double tau = loss.quantile_tau;
      if (y > p) return -tau * std::min(k, (y - p) / (tau * xx));
      if (y < p) return (1.0 - tau) * std::min(k, (p - y) / ((1.0 - tau) * xx));
      return 0.0;
    }
    case LossKind::logarithmic_tanh_link:
      return tanh_link_log_scale(in, y);
  }
  return 0.0;
}

namespace detail {

// Bisection for s = k * l'(p - s*xx) on the bracket [0, k*l'(p)] (ordered).
// g(s) = s - k*l'(p - s*xx) is strictly increasing for convex losses, so the
// bracket always contains the unique root. Bisect essentially to double
// precision; the iteration cap is generous.
inline double implicit_root(const Loss& loss, double p, double y, double xx, double k) {
  const double g0 = k * loss_derivative(loss, p, y);
  if (g0 == 0.0) return 0.0;
  double lo = std::min(0.0, g0);
  double hi = std::max(0.0, g0);
  const auto g = [&](double s) { return s - k * loss_derivative(loss, p - s * xx, y); };
  if (g(lo) > 0.0 || g(hi) < 0.0) throw numeric_error("implicit update: bracket failed (non-convex loss?)");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // interval at ulp width
    if (g(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Imp^2 scale: s solves the proximal step argmin_w 0.5||w - w_t||^2 +
// k * loss(w.x, y), i.e. the fixed point s = k * l'(p - s*xx). Closed form
// for squared loss; identical to the invariant scale for hinge and quantile;
// bisection for the remaining smooth losses.
inline double implicit_scale(const Loss& loss, const ScaleInput& in) {
  validate_scale_input(loss, in);
  if (in.mass == 0.0) return 0.0;
  switch (loss.kind) {
    case LossKind::squared:
      return in.mass * (in.prediction - in.label) / (1.0 + in.mass * in.xx);
    case LossKind::hinge:
    case LossKind::quantile:
      return invariant_scale(loss, in);
    default:
      return detail::implicit_root(loss, in.prediction, in.label, in.xx, in.mass);
  }
}

}  // namespace iwlearn
