#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iwlearn {

enum class LossKind {
  squared,
  logistic,
  exponential,
  logarithmic,
  hellinger,
  hinge,
  quantile,
  logarithmic_tanh_link,
};

enum class LabelSet { any_real, pm_one, zero_one };

// A loss together with its per-loss parameters.
struct Loss {
  LossKind kind = LossKind::squared;
  double quantile_tau = 0.5;  // only read for quantile
  double log_clip_eps = 1e-6; // prediction clip for the logarithmic loss

  static Loss squared() { return {LossKind::squared}; }
  static Loss logistic() { return {LossKind::logistic}; }
  static Loss exponential() { return {LossKind::exponential}; }
  static Loss logarithmic(double eps = 1e-6) { return {LossKind::logarithmic, 0.5, eps}; }
  static Loss hellinger() { return {LossKind::hellinger}; }
  static Loss hinge() { return {LossKind::hinge}; }
  static Loss quantile(double tau) { return {LossKind::quantile, tau}; }
  static Loss logarithmic_tanh_link() { return {LossKind::logarithmic_tanh_link}; }
};

inline const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::squared: return "squared";
    case LossKind::logistic: return "logistic";
    case LossKind::exponential: return "exponential";
    case LossKind::logarithmic: return "logarithmic";
    case LossKind::hellinger: return "hellinger";
    case LossKind::hinge: return "hinge";
    case LossKind::quantile: return "quantile";
    case LossKind::logarithmic_tanh_link: return "logarithmic_tanh";
  }
  return "?";
}

inline LabelSet label_set(LossKind k) {
  switch (k) {
    case LossKind::squared:
    case LossKind::quantile:
      return LabelSet::any_real;
    case LossKind::logistic:
    case LossKind::exponential:
    case LossKind::hinge:
      return LabelSet::pm_one;
    case LossKind::logarithmic:
    case LossKind::hellinger:
    case LossKind::logarithmic_tanh_link:
      return LabelSet::zero_one;
  }
  return LabelSet::any_real;
}

// Decision threshold used for 0/1 error: predictions are probabilities for
// the raw logarithmic losses, raw scores everywhere else (the tanh link maps
// score 0 to probability 1/2).
inline double decision_boundary(LossKind k) {
  return (k == LossKind::logarithmic || k == LossKind::hellinger) ? 0.5 : 0.0;
}

inline void validate_label(const Loss& loss, double y) {
  switch (label_set(loss.kind)) {
    case LabelSet::any_real:
      if (!std::isfinite(y)) throw std::invalid_argument("label must be finite");
      return;
    case LabelSet::pm_one:
      if (y != 1.0 && y != -1.0)
        throw std::invalid_argument(std::string(loss_name(loss.kind)) + " loss requires labels in {-1,+1}");
      return;
    case LabelSet::zero_one:
      if (y != 0.0 && y != 1.0)
        throw std::invalid_argument(std::string(loss_name(loss.kind)) + " loss requires labels in {0,1}");
      return;
  }
}

namespace detail {

// log(1 + e^x) without overflow.
inline double log1pexp(double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); }

// log(e^a + e^b) without overflow; either argument may be -inf.
inline double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace detail

inline double loss_value(const Loss& loss, double p, double y) {
  validate_label(loss, y);
  switch (loss.kind) {
    case LossKind::squared: {
      const double r = y - p;
      return 0.5 * r * r;
    }
    case LossKind::logistic:
      return detail::log1pexp(-y * p);
    case LossKind::exponential:
      return std::exp(-y * p);
    case LossKind::logarithmic: {
      const double eps = loss.log_clip_eps;
      const double q = std::clamp(p, eps, 1.0 - eps);
      return y == 1.0 ? -std::log(q) : -std::log1p(-q);
    }
    case LossKind::hellinger: {
      const double q = std::clamp(p, 0.0, 1.0);
      return y == 1.0 ? 2.0 * (1.0 - std::sqrt(q)) : 2.0 * (1.0 - std::sqrt(1.0 - q));
    }
    case LossKind::hinge:
      return std::max(0.0, 1.0 - y * p);
    case LossKind::quantile: {
      const double tau = loss.quantile_tau;
      return y > p ? tau * (y - p) : (1.0 - tau) * (p - y);
    }
    case LossKind::logarithmic_tanh_link:
      // sigma(p) = (1+tanh p)/2 = 1/(1+e^{-2p}); the {0,1} log loss through
      // this link is the logistic loss at 2p.
      return y == 1.0 ? detail::log1pexp(-2.0 * p) : detail::log1pexp(2.0 * p);
  }
  return 0.0;
}

// d loss / d prediction. At the hinge and quantile corners the subdifferential
// contains zero and we return 0. The logarithmic branches evaluate at the
// clipped prediction so the gradient magnitude is bounded by 1/eps.
inline double loss_derivative(const Loss& loss, double p, double y) {
  validate_label(loss, y);
  switch (loss.kind) {
    case LossKind::squared:
      return p - y;
    case LossKind::logistic: {
      const double v = y * p;
      // -y / (1 + e^{v}) computed from the stable side.
      if (v > 36.0) return -y * std::exp(-v);
      return -y / (1.0 + std::exp(v));
    }
    case LossKind::exponential:
      return -y * std::exp(-y * p);
    case LossKind::logarithmic: {
      const double eps = loss.log_clip_eps;
      const double q = std::clamp(p, eps, 1.0 - eps);
      return y == 1.0 ? -1.0 / q : 1.0 / (1.0 - q);
    }
    case LossKind::hellinger:
      // Singular at the {0,1} endpoints; guard only against the domain edge.
      return y == 1.0 ? -1.0 / std::sqrt(std::max(p, 1e-300))
                      : 1.0 / std::sqrt(std::max(1.0 - p, 1e-300));
    case LossKind::hinge:
      return y * p < 1.0 ? -y : 0.0;
    case LossKind::quantile: {
      const double tau = loss.quantile_tau;
      if (y > p) return -tau;
      if (y < p) return 1.0 - tau;
      return 0.0;
    }
    case LossKind::logarithmic_tanh_link: {
      // y=1: tanh(p)-1 = -2/(1+e^{2p});  y=0: 1+tanh(p) = 2/(1+e^{-2p}).
      const double v = y == 1.0 ? 2.0 * p : -2.0 * p;
      const double mag = v > 36.0 ? 2.0 * std::exp(-v) : 2.0 / (1.0 + std::exp(v));
      return y == 1.0 ? -mag : mag;
    }
  }
  return 0.0;
}

}  // namespace iwlearn
