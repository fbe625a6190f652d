#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iwlearn/active.hpp"
#include "iwlearn/learner.hpp"
#include "iwlearn/parallel.hpp"
#include "iwlearn/report.hpp"

namespace iwlearn {

// Cross product of schedules, update rules and losses for a sweep.
struct SweepGrid {
  std::vector<double> mus;
  std::vector<double> taus;
  std::vector<double> powers;
  std::vector<UpdateRule> rules;
  std::vector<Loss> losses;
  bool per_example_norm = true;
  double lambda = 0.0;
};

// The exhaustive schedule grid used throughout the experiments:
// mu in {2^0..2^10}, tau in {10^0..10^8}, power in {0.5, 1} (198 schedules).
inline SweepGrid default_schedule_grid() {
  SweepGrid g;
  for (int i = 0; i <= 10; ++i) g.mus.push_back(std::pow(2.0, i));
  for (int i = 0; i <= 8; ++i) g.taus.push_back(std::pow(10.0, i));
  g.powers = {0.5, 1.0};
  return g;
}

inline std::vector<double> default_c0_grid() {
  std::vector<double> c0s;
  for (int i = -8; i <= 1; ++i) c0s.push_back(std::pow(10.0, i));
  return c0s;
}

// How a trained model is scored for a given loss: the decision threshold for
// 0/1 error, plus the [0,1] clip link when squared loss is run on {0,1} data.
struct EvalPolicy {
  double boundary = 0.0;
  bool clip_unit_interval = false;
};

inline EvalPolicy eval_policy(const Loss& loss, double boundary_override = std::numeric_limits<double>::quiet_NaN()) {
  EvalPolicy p;
  p.boundary = std::isnan(boundary_override) ? decision_boundary(loss.kind) : boundary_override;
  p.clip_unit_interval = loss.kind == LossKind::squared && p.boundary == 0.5;
  return p;
}

inline RunRecord make_record(const TrainConfig& cfg) {
  RunRecord r;
  r.loss = loss_name(cfg.loss.kind);
  r.rule = rule_name(cfg.rule);
  r.mu = cfg.schedule.mu;
  r.tau = cfg.schedule.tau;
  r.power = cfg.schedule.power;
  r.lambda = cfg.lambda;
  r.quantile_tau = cfg.loss.quantile_tau;
  return r;
}

// One passive run: single training pass, then test-set evaluation.
inline RunRecord run_passive(std::span<const Example> train, std::span<const Example> test,
                             const TrainConfig& cfg, const EvalPolicy& policy) {
  RunRecord rec = make_record(cfg);
  rec.train_examples = train.size();
  rec.labels_used = train.size();
  const TrainResult res = train_pass(train, cfg);
  rec.pv_loss = res.pv_loss;
  rec.diverged = res.diverged;
  if (!res.diverged) {
    const EvalResult ev = evaluate(res.model, test, cfg.loss, policy.boundary, policy.clip_unit_interval);
    // a finished pass can still carry non-finite weights short of an overflow
    if (std::isfinite(ev.accuracy) && std::isfinite(ev.mean_loss)) {
      rec.test_accuracy = ev.accuracy;
      rec.test_loss = ev.mean_loss;
    } else {
      rec.diverged = true;
    }
  }
  return rec;
}

// One active run over the same data; labels are charged only when queried.
inline RunRecord run_active_once(std::span<const Example> train, std::span<const Example> test,
                                 const TrainConfig& cfg, const ActiveConfig& acfg,
                                 const EvalPolicy& policy) {
  RunRecord rec = make_record(cfg);
  rec.train_examples = train.size();
  rec.c0 = acfg.c0;
  rec.seed = acfg.seed;
  const ActiveResult res = run_active(train, cfg, acfg);
  rec.labels_used = res.labels_queried;
  rec.fraction_queried = res.fraction_queried;
  rec.cap_events = res.cap_events;
  rec.pv_loss = res.model.pv_mean();
  rec.diverged = res.diverged;
  if (!res.diverged) {
    const EvalResult ev = evaluate(res.model, test, cfg.loss, policy.boundary, policy.clip_unit_interval);
    if (std::isfinite(ev.accuracy) && std::isfinite(ev.mean_loss)) {
      rec.test_accuracy = ev.accuracy;
      rec.test_loss = ev.mean_loss;
    } else {
      rec.diverged = true;
    }
  }
  return rec;
}

namespace detail {

inline std::vector<TrainConfig> expand_grid(const SweepGrid& grid) {
  std::vector<TrainConfig> cells;
  for (const Loss& loss : grid.losses) {
    for (UpdateRule rule : grid.rules) {
      for (double mu : grid.mus) {
        for (double tau : grid.taus) {
          for (double power : grid.powers) {
            TrainConfig cfg;
            cfg.loss = loss;
            cfg.rule = rule;
            cfg.schedule = {mu, tau, power, grid.per_example_norm};
            cfg.lambda = grid.lambda;
            cells.push_back(cfg);
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace detail

// Every grid cell is an independent run; cells execute in a worker pool and
// land in a fixed slot, so the output is identical to the sequential order.
inline std::vector<RunRecord> run_sweep(std::span<const Example> train, std::span<const Example> test,
                                        const SweepGrid& grid, unsigned threads = 1,
                                        double boundary_override = std::numeric_limits<double>::quiet_NaN()) {
  const auto cells = detail::expand_grid(grid);
  std::vector<RunRecord> records(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    records[i] = run_passive(train, test, cells[i], eval_policy(cells[i].loss, boundary_override));
  });
  return records;
}

inline std::vector<RunRecord> run_active_sweep(std::span<const Example> train,
                                               std::span<const Example> test, const SweepGrid& grid,
                                               const std::vector<double>& c0s, std::uint64_t seed,
                                               double max_importance, unsigned threads = 1,
                                               double boundary_override = std::numeric_limits<double>::quiet_NaN()) {
  const auto cells = detail::expand_grid(grid);
  std::vector<RunRecord> records(cells.size() * c0s.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const std::size_t cell = i / c0s.size();
    const std::size_t c0_idx = i % c0s.size();
    const TrainConfig& cfg = cells[cell];
    const EvalPolicy policy = eval_policy(cfg.loss, boundary_override);
    ActiveConfig acfg;
    acfg.c0 = c0s[c0_idx];
    acfg.boundary = policy.boundary;
    acfg.seed = seed;
    acfg.max_importance = max_importance;
    records[i] = run_active_once(train, test, cfg, acfg, policy);
  });
  return records;
}

}  // namespace iwlearn
