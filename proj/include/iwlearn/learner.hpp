#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "iwlearn/errors.hpp"
#include "iwlearn/example.hpp"
#include "iwlearn/losses.hpp"
#include "iwlearn/scales.hpp"
#include "iwlearn/schedule.hpp"

namespace iwlearn {

enum class UpdateRule { standard, invariant, implicit };

inline const char* rule_name(UpdateRule r) {
  switch (r) {
    case UpdateRule::standard: return "standard";
    case UpdateRule::invariant: return "invariant";
    case UpdateRule::implicit: return "implicit";
  }
  return "?";
}

struct TrainConfig {
  Loss loss;
  UpdateRule rule = UpdateRule::invariant;
  Schedule schedule;
  double lambda = 0.0;  // L2 strength; applied by the splitting step
};

// Dense weight vector with a lazily applied global multiplier, so the L2
// shrink w <- w / (1 + k*lambda) stays O(nnz) per example. The vector grows
// on demand to max feature id + 1.
class Model {
 public:
  Model() = default;
  explicit Model(std::size_t dim) : weights_(dim, 0.0) {}

  double predict(const Example& ex) const {
    double dot = 0.0;
    for (const auto& [id, v] : ex.features) {
      if (id < weights_.size()) dot += weights_[id] * v;
    }
    return scale_ * dot;
  }

  // w <- (w - s*x) / divisor
  void apply_update(const Example& ex, double s, double divisor) {
    if (s != 0.0) {
      ensure_dim(ex);
      const double s_unscaled = s / scale_;
      for (const auto& [id, v] : ex.features) weights_[id] -= s_unscaled * v;
    }
    if (divisor != 1.0) {
      scale_ /= divisor;
      if (scale_ < 1e-150) materialize();
    }
  }

  std::size_t dim() const { return weights_.size(); }
  double weight(std::size_t i) const { return i < weights_.size() ? scale_ * weights_[i] : 0.0; }
  std::vector<double> weights() const {
    std::vector<double> out(weights_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale_ * weights_[i];
    return out;
  }

  std::uint64_t examples_seen() const { return t_; }
  void count_example(double pre_update_loss) {
    ++t_;
    pv_sum_ += pre_update_loss;
    ++pv_count_;
  }
  std::uint64_t pv_count() const { return pv_count_; }
  double pv_mean() const {
    return pv_count_ == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : pv_sum_ / static_cast<double>(pv_count_);
  }

 private:
  void ensure_dim(const Example& ex) {
    std::size_t need = weights_.size();
    for (const auto& [id, v] : ex.features) need = std::max<std::size_t>(need, id + 1);
    if (need > weights_.size()) weights_.resize(need, 0.0);
  }
  void materialize() {
    for (auto& w : weights_) w *= scale_;
    scale_ = 1.0;
  }

  std::vector<double> weights_;
  double scale_ = 1.0;
  std::uint64_t t_ = 0;
  double pv_sum_ = 0.0;
  std::uint64_t pv_count_ = 0;
};

inline double predict(const Model& m, const Example& ex) { return m.predict(ex); }

// Scale of a single update under the chosen rule, given the effective mass.
inline double update_scale(const Loss& loss, UpdateRule rule, const ScaleInput& in) {
  switch (rule) {
    case UpdateRule::standard:
      return in.mass * loss_derivative(loss, in.prediction, in.label);
    case UpdateRule::invariant:
      return invariant_scale(loss, in);
    case UpdateRule::implicit:
      return implicit_scale(loss, in);
  }
  return 0.0;
}

// One online step: predict, accumulate progressive validation loss, compute
// the effective mass for this example's importance, apply the update and the
// regularizer split. Throws numeric_error when the step stops being finite
// (only the standard rule with extreme rates can get there).
inline void update_example(Model& m, const Example& ex, const TrainConfig& cfg,
                           std::optional<double> importance_override = std::nullopt) {
  const double h = importance_override.value_or(ex.importance);
  if (!(h >= 0.0)) throw std::invalid_argument("importance must be >= 0");
  const double xx = ex.xx;
  const double p = m.predict(ex);
  const double pv = loss_value(cfg.loss, p, ex.label);
  const std::uint64_t t = m.examples_seen() + 1;

  double s = 0.0;
  double k = 0.0;
  if (xx > 0.0 && h > 0.0) {
    k = effective_mass(cfg.schedule, t, h, xx);
    s = update_scale(cfg.loss, cfg.rule, {p, ex.label, xx, k});
  }
  if (!std::isfinite(p) || !std::isfinite(s)) throw numeric_error("non-finite update (p or scale)");
  m.apply_update(ex, s, 1.0 + k * cfg.lambda);
  m.count_example(pv);
}

struct TrainResult {
  Model model;
  double pv_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t examples = 0;
  bool diverged = false;
  std::uint64_t diverged_at = 0;  // 1-based index of the offending example
};

// Single in-order pass over the stream. A divergence aborts the pass and is
// reported in the result instead of propagating, so sweeps can record it.
template <class Source>
TrainResult train_pass_stream(Source&& source, const TrainConfig& cfg) {
  TrainResult res;
  std::uint64_t index = 0;
  while (auto ex = source.next()) {
    ++index;
    try {
      update_example(res.model, *ex, cfg);
    } catch (const numeric_error&) {
      res.diverged = true;
      res.diverged_at = index;
      break;
    }
  }
  res.examples = index;
  res.pv_loss = res.model.pv_mean();
  return res;
}

namespace detail {

struct SpanSource {
  std::span<const Example> data;
  std::size_t pos = 0;
  std::optional<Example> next() {
    if (pos >= data.size()) return std::nullopt;
    return data[pos++];
  }
};

}  // namespace detail

inline TrainResult train_pass(std::span<const Example> data, const TrainConfig& cfg) {
  return train_pass_stream(detail::SpanSource{data}, cfg);
}

struct EvalResult {
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n = 0;
};

// 0/1 error against the boundary (ties count as the positive side) plus mean
// loss. clip_unit_interval applies the [0,1] clip link before the loss, which
// is how the squared-loss-on-{0,1} setup is scored.
inline EvalResult evaluate(const Model& m, std::span<const Example> data, const Loss& loss,
                           double boundary, bool clip_unit_interval = false) {
  EvalResult r;
  if (data.empty()) return r;
  std::uint64_t correct = 0;
  double loss_sum = 0.0;
  for (const Example& ex : data) {
    double p = m.predict(ex);
    if ((p >= boundary) == (ex.label >= boundary)) ++correct;
    if (clip_unit_interval) p = std::clamp(p, 0.0, 1.0);
    loss_sum += loss_value(loss, p, ex.label);
  }
  r.n = data.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  r.mean_loss = loss_sum / static_cast<double>(r.n);
  return r;
}

}  // namespace iwlearn
