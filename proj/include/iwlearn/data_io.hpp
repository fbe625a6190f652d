#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iwlearn/errors.hpp"
#include "iwlearn/example.hpp"
#include "iwlearn/rng.hpp"

namespace iwlearn {

namespace detail {

inline bool parse_double(std::string_view tok, double* out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Line format: <label> [<importance>] <idx>:<val> ...
// The second token is the importance iff it contains no ':'. Feature ids are
// non-negative integers taken literally.
inline Example parse_example(std::string_view line, std::uint64_t line_no = 0) {
  Example ex;
  std::vector<std::string_view> tokens;
  std::size_t col_of_token_start = 0;
  std::vector<std::size_t> cols;
  {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      col_of_token_start = i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      tokens.push_back(line.substr(i, j - i));
      cols.push_back(col_of_token_start + 1);  // 1-based
      i = j;
    }
  }
  if (tokens.empty()) throw parse_error("empty example line", line_no);

  if (!detail::parse_double(tokens[0], &ex.label) || !std::isfinite(ex.label))
    throw parse_error("bad label token '" + std::string(tokens[0]) + "'", line_no, cols[0]);

  std::size_t first_feature = 1;
  if (tokens.size() > 1 && tokens[1].find(':') == std::string_view::npos) {
    if (!detail::parse_double(tokens[1], &ex.importance) || !std::isfinite(ex.importance))
      throw parse_error("bad importance token '" + std::string(tokens[1]) + "'", line_no, cols[1]);
    if (!(ex.importance > 0.0))
      throw parse_error("importance must be positive", line_no, cols[1]);
    first_feature = 2;
  }

  for (std::size_t i = first_feature; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= tok.size())
      throw parse_error("bad feature token '" + std::string(tok) + "'", line_no, cols[i]);
    const std::string_view id_part = tok.substr(0, colon);
    const std::string_view val_part = tok.substr(colon + 1);
    std::uint32_t id = 0;
    {
      const char* b = id_part.data();
      const char* e = b + id_part.size();
      auto [ptr, ec] = std::from_chars(b, e, id);
      if (ec != std::errc() || ptr != e)
        throw parse_error("bad feature id in '" + std::string(tok) + "'", line_no, cols[i]);
    }
    double value = 0.0;
    if (!detail::parse_double(val_part, &value) || !std::isfinite(value))
      throw parse_error("bad feature value in '" + std::string(tok) + "'", line_no, cols[i]);
    ex.features.emplace_back(id, value);
  }

  // reject duplicate ids
  {
    auto sorted = ex.features;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].first == sorted[i - 1].first)
        throw parse_error("duplicate feature id " + std::to_string(sorted[i].first), line_no);
    }
  }
  ex.recompute_xx();
  return ex;
}

inline std::string serialize_example(const Example& ex) {
  std::ostringstream os;
  os.precision(17);
  os << ex.label;
  if (ex.importance != 1.0) os << ' ' << ex.importance;
  for (const auto& [id, v] : ex.features) os << ' ' << id << ':' << v;
  return os.str();
}

// Lazy line-oriented reader: order preserving, one example of state. Lines
// starting with '#' and blank lines are skipped. Errors carry line numbers.
class DatasetStream {
 public:
  explicit DatasetStream(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw parse_error("cannot open dataset file '" + path + "'");
  }

  std::optional<Example> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto pos = line.find_first_not_of(" \t");
      if (pos == std::string::npos) continue;
      if (line[pos] == '#') continue;
      return parse_example(line, line_no_);
    }
    if (in_.bad()) throw parse_error("I/O error reading '" + path_ + "'", line_no_);
    return std::nullopt;
  }

  std::uint64_t line_number() const { return line_no_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::uint64_t line_no_ = 0;
};

inline std::vector<Example> load_dataset(const std::string& path) {
  DatasetStream stream(path);
  std::vector<Example> out;
  while (auto ex = stream.next()) out.push_back(std::move(*ex));
  return out;
}

inline void save_dataset(const std::string& path, const std::vector<Example>& data) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open '" + path + "' for writing");
  for (const auto& ex : data) out << serialize_example(ex) << '\n';
}

// Synthetic linearly-structured task: hidden unit vector w*, gaussian points
// kept only when |w*.x| >= margin, labels sign(w*.x) in {-1,+1} flipped with
// probability label_noise, importance drawn uniformly from importance_values.
// Fully determined by the seed.
struct SynthSpec {
  std::uint32_t dim = 20;
  std::uint64_t n = 1000;
  double margin = 0.1;
  double label_noise = 0.0;
  std::vector<double> importance_values = {1.0};
  std::uint64_t seed = 1;
  bool zero_one_labels = false;  // emit {0,1} instead of {-1,+1}
};

inline std::vector<Example> synth_generate(const SynthSpec& spec) {
  if (spec.dim == 0 || spec.n == 0) throw std::invalid_argument("synth: dim and n must be positive");
  if (!(spec.label_noise >= 0.0 && spec.label_noise < 0.5))
    throw std::invalid_argument("synth: label_noise must lie in [0, 0.5)");
  if (spec.importance_values.empty()) throw std::invalid_argument("synth: importance_values empty");
  for (double h : spec.importance_values)
    if (!(h > 0.0)) throw std::invalid_argument("synth: importance values must be positive");

  SplitMix rng(spec.seed);
  std::vector<double> wstar(spec.dim);
  double norm = 0.0;
  for (auto& w : wstar) {
    w = rng.next_gaussian();
    norm += w * w;
  }
  norm = std::sqrt(norm);
  for (auto& w : wstar) w /= norm;

  std::vector<Example> out;
  out.reserve(spec.n);
  std::vector<double> x(spec.dim);
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    double m = 0.0;
    do {
      m = 0.0;
      for (std::uint32_t d = 0; d < spec.dim; ++d) {
        x[d] = rng.next_gaussian();
        m += wstar[d] * x[d];
      }
    } while (std::abs(m) < spec.margin);
    double label = m >= 0.0 ? 1.0 : -1.0;
    if (rng.next_uniform() < spec.label_noise) label = -label;
    if (spec.zero_one_labels) label = label > 0.0 ? 1.0 : 0.0;
    const double importance =
        spec.importance_values[rng.next_below(spec.importance_values.size())];
    Example ex;
    ex.label = label;
    ex.importance = importance;
    ex.features.reserve(spec.dim);
    for (std::uint32_t d = 0; d < spec.dim; ++d) ex.features.emplace_back(d, x[d]);
    ex.recompute_xx();
    out.push_back(std::move(ex));
  }
  return out;
}

// Deterministic partition into train/test. Both halves preserve the original
// stream order; the test subset is chosen by a seeded shuffle of indices.
inline std::pair<std::vector<Example>, std::vector<Example>> split(const std::vector<Example>& data,
                                                                   double test_fraction,
                                                                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split: test_fraction must lie in (0,1)");
  const std::size_t n = data.size();
  const std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  SplitMix rng(seed);
  for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test && i < n; ++i) is_test[idx[i]] = true;
  std::pair<std::vector<Example>, std::vector<Example>> out;
  for (std::size_t i = 0; i < n; ++i) {
    (is_test[i] ? out.second : out.first).push_back(data[i]);
  }
  return out;
}

}  // namespace iwlearn
