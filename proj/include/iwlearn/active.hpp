#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

#include "iwlearn/learner.hpp"
#include "iwlearn/rng.hpp"

namespace iwlearn {

struct ActiveConfig {
  double c0 = 1.0;               // query aggressiveness
  double boundary = 0.0;         // decision threshold b
  std::uint64_t seed = 0;        // query randomness
  double max_importance = 1e6;   // cap on 1/P fed to the learner
};

struct QueryDecision {
  double g_estimate = 0.0;        // flip importance / round index
  double flip_importance = 0.0;   // minimal h that moves the prediction to the boundary
  double query_prob = 0.0;
  bool queried = false;
  double applied_importance = 0.0;  // 1/P when queried (cap is applied separately)
};

// Label set in play for an active run: fixed by the loss when it constrains
// labels, otherwise read off the boundary convention.
inline LabelSet active_label_set(const Loss& loss, double boundary) {
  const LabelSet ls = label_set(loss.kind);
  if (ls != LabelSet::any_real) return ls;
  return boundary >= 0.25 ? LabelSet::zero_one : LabelSet::pm_one;
}

// The label on the opposite side of the boundary from the prediction. Ties
// treat the prediction as positive, so the alternative is the negative label.
inline double alternative_label(double p, double boundary, LabelSet set) {
  const double pos = 1.0;
  const double neg = set == LabelSet::zero_one ? 0.0 : -1.0;
  return p >= boundary ? neg : pos;
}

namespace detail {

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Mass k*xx needed by the invariant update with label y_a to move the
// prediction from p exactly to b. Unreachable targets return +inf.
inline double invariant_flip_mass_xx(const Loss& loss, double p, double y_a, double b) {
  if (p == b) return 0.0;
  switch (loss.kind) {
    case LossKind::squared: {
      if (p == y_a) return kUnreachable;
      const double ratio = (b - y_a) / (p - y_a);
      if (!(ratio > 0.0 && ratio < 1.0)) return kUnreachable;
      return -std::log(ratio);
    }
    case LossKind::hinge: {
      if (!(y_a * (b - p) > 0.0) || y_a * b > 1.0) return kUnreachable;
      return (b - p) / y_a;  // = |b-p|, the hinge segment is linear with slope 1
    }
    case LossKind::quantile: {
      const double tau = loss.quantile_tau;
      if (y_a > p) {
        if (!(b > p && b <= y_a) || tau == 0.0) return kUnreachable;
        return (b - p) / tau;  // prediction climbs at slope tau per unit of k*xx
      }
      if (y_a < p) {
        if (!(b < p && b >= y_a) || tau == 1.0) return kUnreachable;
        return (p - b) / (1.0 - tau);
      }
      return kUnreachable;
    }
    case LossKind::logistic: {
      const double vb = y_a * b;
      const double vp = y_a * p;
      if (!(vb > vp)) return kUnreachable;
      return (vb + std::exp(vb)) - (vp + std::exp(vp));
    }
    case LossKind::exponential: {
      const double d = std::exp(y_a * b) - std::exp(y_a * p);
      return d > 0.0 ? d : kUnreachable;
    }
    case LossKind::logarithmic: {
      const double eps = loss.log_clip_eps;
      if (y_a == 1.0) {
        if (!(b > p) || b > 1.0 - eps) return kUnreachable;
        return 0.5 * (b * b - p * p);
      }
      if (!(b < p) || b < eps) return kUnreachable;
      const double ob = 1.0 - b;
      const double op = 1.0 - p;
      return 0.5 * (ob * ob - op * op);
    }
    case LossKind::hellinger: {
      if (y_a == 1.0) {
        if (!(b > p && p >= 0.0)) return kUnreachable;
        return (2.0 / 3.0) * (b * std::sqrt(b) - p * std::sqrt(p));
      }
      if (!(b < p && p <= 1.0)) return kUnreachable;
      const double ob = 1.0 - b;
      const double op = 1.0 - p;
      return (2.0 / 3.0) * (ob * std::sqrt(ob) - op * std::sqrt(op));
    }
    case LossKind::logarithmic_tanh_link: {
      // invert 2q + e^{2q} (y=1) resp. -2q + e^{-2q} (y=0) between p and b
      if (y_a == 1.0) {
        if (!(b > p)) return kUnreachable;
        return 0.25 * ((2.0 * b + std::exp(2.0 * b)) - (2.0 * p + std::exp(2.0 * p)));
      }
      if (!(b < p)) return kUnreachable;
      return 0.25 * ((std::exp(-2.0 * b) - 2.0 * b) - (std::exp(-2.0 * p) - 2.0 * p));
    }
  }
  return kUnreachable;
}

}  // namespace detail

// Minimal importance weight such that one update on (x, y_a, h) under the
// given rule lands the prediction exactly on the boundary; +inf when the
// update can never reach it. The rate is treated as constant at its current
// value eta_t, matching how the estimate is consumed.
inline double flip_importance(const Loss& loss, UpdateRule rule, double p, double xx,
                              double eta_t, double y_a, double boundary) {
  if (!(eta_t > 0.0) || !(xx > 0.0)) throw std::invalid_argument("flip_importance: need eta_t > 0 and xx > 0");
  if (p == boundary) return 0.0;
  switch (rule) {
    case UpdateRule::invariant: {
      const double mass_xx = detail::invariant_flip_mass_xx(loss, p, y_a, boundary);
      return mass_xx / (eta_t * xx);
    }
    case UpdateRule::implicit: {
      if (loss.kind == LossKind::hinge || loss.kind == LossKind::quantile) {
        const double mass_xx = detail::invariant_flip_mass_xx(loss, p, y_a, boundary);
        return mass_xx / (eta_t * xx);
      }
      // stationarity at the target: (p-b)/xx = k * l'(b, y_a)
      const double d = loss_derivative(loss, boundary, y_a);
      if (d == 0.0) return detail::kUnreachable;
      const double k = (p - boundary) / (xx * d);
      return k > 0.0 ? k / eta_t : detail::kUnreachable;
    }
    case UpdateRule::standard: {
      // one multiplied-gradient step: p - h*eta*l'(p, y_a)*xx = b
      const double d = loss_derivative(loss, p, y_a);
      if (d == 0.0) return detail::kUnreachable;
      const double k = (p - boundary) / (xx * d);
      return k > 0.0 ? k / eta_t : detail::kUnreachable;
    }
  }
  return detail::kUnreachable;
}

// P = min(1, C0 / h_flip). Zero flip importance queries with certainty; an
// unreachable flip never queries.
inline double query_probability(double flip_h, const ActiveConfig& cfg) {
  if (!(cfg.c0 > 0.0)) throw std::invalid_argument("active: c0 must be positive");
  if (!(flip_h >= 0.0)) throw std::invalid_argument("active: flip importance must be >= 0");
  if (std::isinf(flip_h)) return 0.0;
  if (flip_h <= cfg.c0) return 1.0;
  return cfg.c0 / flip_h;
}

// One round of the online active loop. The label is consulted only when the
// coin lands on querying; skipped rounds leave the model untouched. The coin
// is keyed by (seed, round) so decisions replay exactly.
inline QueryDecision active_step(Model& m, const Example& ex, const TrainConfig& cfg,
                                 const ActiveConfig& acfg, std::uint64_t round,
                                 std::uint64_t* cap_events = nullptr) {
  QueryDecision d;
  const double p = m.predict(ex);
  const double xx = ex.xx;
  if (!(xx > 0.0)) return d;  // featureless example carries no signal
  const double eta = schedule_rate(cfg.schedule, m.examples_seen() + 1, xx);
  const LabelSet set = active_label_set(cfg.loss, acfg.boundary);
  const double y_a = alternative_label(p, acfg.boundary, set);
  d.flip_importance = flip_importance(cfg.loss, cfg.rule, p, xx, eta, y_a, acfg.boundary);
  d.g_estimate = round > 0 ? d.flip_importance / static_cast<double>(round) : d.flip_importance;
  d.query_prob = query_probability(d.flip_importance, acfg);
  d.queried = uniform01(acfg.seed, round) < d.query_prob;
  if (d.queried) {
    d.applied_importance = 1.0 / d.query_prob;
    double applied = d.applied_importance;
    if (applied > acfg.max_importance) {
      applied = acfg.max_importance;
      if (cap_events) ++*cap_events;
    }
    update_example(m, ex, cfg, applied);
  }
  return d;
}

struct ActiveResult {
  Model model;
  std::uint64_t rounds = 0;
  std::uint64_t labels_queried = 0;
  double fraction_queried = 0.0;
  std::uint64_t cap_events = 0;
  bool diverged = false;
  std::uint64_t diverged_at = 0;
};

inline ActiveResult run_active(std::span<const Example> stream, const TrainConfig& cfg,
                               const ActiveConfig& acfg) {
  if (!(acfg.max_importance >= 1.0)) throw std::invalid_argument("active: max_importance must be >= 1");
  ActiveResult res;
  std::uint64_t round = 0;
  for (const Example& ex : stream) {
    ++round;
    try {
      const QueryDecision d = active_step(res.model, ex, cfg, acfg, round, &res.cap_events);
      if (d.queried) ++res.labels_queried;
    } catch (const numeric_error&) {
      res.diverged = true;
      res.diverged_at = round;
      break;
    }
  }
  res.rounds = round;
  res.fraction_queried =
      round == 0 ? 0.0 : static_cast<double>(res.labels_queried) / static_cast<double>(round);
  return res;
}

}  // namespace iwlearn
