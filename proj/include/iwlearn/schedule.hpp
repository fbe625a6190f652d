#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace iwlearn {

// Learning rate family eta_t = (mu / x.x) * (tau / (t + tau))^power, with the
// per-example normalization optional. power is restricted to {0.5, 1} so the
// mass integral below stays closed form.
struct Schedule {
  double mu = 1.0;
  double tau = 1.0;
  double power = 0.5;
  bool per_example_norm = true;
};

inline void validate_schedule(const Schedule& s) {
  if (!(s.mu > 0.0)) throw std::invalid_argument("schedule: mu must be positive");
  if (!(s.tau > 0.0)) throw std::invalid_argument("schedule: tau must be positive");
  if (s.power != 0.5 && s.power != 1.0) throw std::invalid_argument("schedule: power must be 0.5 or 1");
}

inline double schedule_rate(const Schedule& s, std::uint64_t t, double xx) {
  validate_schedule(s);
  if (t < 1) throw std::invalid_argument("schedule: t starts at 1");
  const double c = s.per_example_norm ? s.mu / xx : s.mu;
  const double ratio = s.tau / (static_cast<double>(t) + s.tau);
  return c * (s.power == 1.0 ? ratio : std::sqrt(ratio));
}

// Integral of (start + u)^(-power) for u in [0, h], in cancellation-free form.
inline double power_integral(double start, double h, double power) {
  if (!(start > 0.0) || !(h >= 0.0)) throw std::invalid_argument("power_integral: need start > 0, h >= 0");
  if (power == 1.0) return std::log1p(h / start);
  if (power == 0.5) return 2.0 * h / (std::sqrt(start + h) + std::sqrt(start));
  throw std::invalid_argument("power_integral: power must be 0.5 or 1");
}

// Effective mass of importance weight h at time t: the integral of the
// schedule rate over h consecutive presentations starting at t. This replaces
// h*eta everywhere once the rate decays.
inline double effective_mass(const Schedule& s, std::uint64_t t, double h, double xx) {
  validate_schedule(s);
  if (t < 1) throw std::invalid_argument("schedule: t starts at 1");
  if (!(h >= 0.0)) throw std::invalid_argument("effective_mass: h must be >= 0");
  if (h == 0.0) return 0.0;
  const double c = s.per_example_norm ? s.mu / xx : s.mu;
  const double scale = s.power == 1.0 ? s.tau : std::sqrt(s.tau);
  return c * scale * power_integral(static_cast<double>(t) + s.tau, h, s.power);
}

}  // namespace iwlearn
