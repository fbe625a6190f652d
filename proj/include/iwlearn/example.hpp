#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace iwlearn {

// One training triple: sparse features, label, importance weight. x.x is
// cached at construction because every update needs it.
struct Example {
  double label = 0.0;
  double importance = 1.0;
  std::vector<std::pair<std::uint32_t, double>> features;
  double xx = 0.0;

  void recompute_xx() {
    double s = 0.0;
    for (const auto& [id, v] : features) s += v * v;
    xx = s;
  }
};

inline Example make_example(double label, std::vector<std::pair<std::uint32_t, double>> features,
                            double importance = 1.0) {
  Example e;
  e.label = label;
  e.importance = importance;
  e.features = std::move(features);
  e.recompute_xx();
  return e;
}

}  // namespace iwlearn
