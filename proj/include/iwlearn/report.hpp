#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "iwlearn/errors.hpp"

namespace iwlearn {

// One experiment outcome. Passive runs leave c0/fraction_queried as NaN;
// diverged runs leave the test metrics as NaN.
struct RunRecord {
  std::string loss;
  std::string rule;
  double mu = 0.0;
  double tau = 0.0;
  double power = 0.0;
  double lambda = 0.0;
  double quantile_tau = 0.5;
  double c0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::uint64_t train_examples = 0;
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  double pv_loss = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t labels_used = 0;
  double fraction_queried = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t cap_events = 0;
  bool diverged = false;
};

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline double parse_double_or_nan(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string run_record_csv_header() {
  return "loss,rule,mu,tau,power,lambda,quantile_tau,c0,seed,train_examples,"
         "test_accuracy,test_loss,pv_loss,labels_used,fraction_queried,cap_events,diverged";
}

inline std::string to_csv_row(const RunRecord& r) {
  using detail::fmt_double;
  std::ostringstream os;
  os << r.loss << ',' << r.rule << ',' << fmt_double(r.mu) << ',' << fmt_double(r.tau) << ','
     << fmt_double(r.power) << ',' << fmt_double(r.lambda) << ',' << fmt_double(r.quantile_tau)
     << ',' << fmt_double(r.c0) << ',' << r.seed << ',' << r.train_examples << ','
     << fmt_double(r.test_accuracy) << ',' << fmt_double(r.test_loss) << ','
     << fmt_double(r.pv_loss) << ',' << r.labels_used << ',' << fmt_double(r.fraction_queried)
     << ',' << r.cap_events << ',' << (r.diverged ? 1 : 0);
  return os.str();
}

inline RunRecord run_record_from_csv(const std::string& line, std::uint64_t line_no = 0) {
  const auto f = detail::split_csv_line(line);
  if (f.size() != 17) throw parse_error("bad record: expected 17 fields", line_no);
  RunRecord r;
  try {
    r.loss = f[0];
    r.rule = f[1];
    r.mu = detail::parse_double_or_nan(f[2]);
    r.tau = detail::parse_double_or_nan(f[3]);
    r.power = detail::parse_double_or_nan(f[4]);
    r.lambda = detail::parse_double_or_nan(f[5]);
    r.quantile_tau = detail::parse_double_or_nan(f[6]);
    r.c0 = detail::parse_double_or_nan(f[7]);
    r.seed = f[8].empty() ? 0 : std::stoull(f[8]);
    r.train_examples = f[9].empty() ? 0 : std::stoull(f[9]);
    r.test_accuracy = detail::parse_double_or_nan(f[10]);
    r.test_loss = detail::parse_double_or_nan(f[11]);
    r.pv_loss = detail::parse_double_or_nan(f[12]);
    r.labels_used = f[13].empty() ? 0 : std::stoull(f[13]);
    r.fraction_queried = detail::parse_double_or_nan(f[14]);
    r.cap_events = f[15].empty() ? 0 : std::stoull(f[15]);
    r.diverged = f[16] == "1" || f[16] == "true";
  } catch (const std::exception& e) {
    throw parse_error(std::string("bad record field: ") + e.what(), line_no);
  }
  return r;
}

inline void save_records(const std::string& path, std::span<const RunRecord> records) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open '" + path + "' for writing");
  out << run_record_csv_header() << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

inline std::vector<RunRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open records file '" + path + "'");
  std::vector<RunRecord> out;
  std::string line;
  std::uint64_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;  // header row
    }
    out.push_back(run_record_from_csv(line, line_no));
  }
  return out;
}

// Non-dominated subset of (fraction, error) points, sorted by fraction.
// A point dominates another when it is <= on both axes and < on at least one;
// exact duplicates keep a single representative.
inline std::vector<std::pair<double, double>> pareto_frontier(
    std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  std::vector<std::pair<double, double>> out;
  double best_error = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    // sorted by (fraction, error): a point survives iff it strictly improves
    // the best error seen so far, which also deduplicates ties
    if (pt.second < best_error) {
      out.push_back(pt);
      best_error = pt.second;
    }
  }
  return out;
}

// Fraction of configurations whose accuracy lands within tol of the best.
// Diverged runs stay in the denominator; NaN when every run diverged.
inline double near_optimal_fraction(std::span<const RunRecord> records, double tol = 0.001) {
  if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    if (!r.diverged && std::isfinite(r.test_accuracy)) best = std::max(best, r.test_accuracy);
  }
  if (!std::isfinite(best)) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (!r.diverged && std::isfinite(r.test_accuracy) && r.test_accuracy >= best - tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

struct ComplexityResult {
  bool passive_reached = false;
  bool active_reached = false;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t passive_labels = 0;
  std::uint64_t active_labels = 0;
};

// Labels needed by the best passive run to hit the target accuracy, divided
// by the fewest labels any active run needed for the same target. > 1 means
// the active learner wins.
inline ComplexityResult label_complexity_ratio(std::span<const RunRecord> passive,
                                               std::span<const RunRecord> active,
                                               double target_accuracy) {
  ComplexityResult res;
  std::uint64_t passive_best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : passive) {
    if (!r.diverged && r.test_accuracy >= target_accuracy) {
      res.passive_reached = true;
      passive_best = std::min(passive_best, r.labels_used);
    }
  }
  std::uint64_t active_best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& r : active) {
    if (!r.diverged && r.test_accuracy >= target_accuracy) {
      res.active_reached = true;
      active_best = std::min(active_best, r.labels_used);
    }
  }
  if (res.passive_reached) res.passive_labels = passive_best;
  if (res.active_reached) res.active_labels = active_best;
  if (res.passive_reached && res.active_reached && active_best > 0) {
    res.ratio = static_cast<double>(passive_best) / static_cast<double>(active_best);
  }
  return res;
}

}  // namespace iwlearn
