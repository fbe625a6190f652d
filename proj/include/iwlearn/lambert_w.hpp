#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iwlearn {

namespace detail {

// Halley iteration for w + log w = a, w > 0. This is W(e^a) in log space,
// which stays finite for exponents far beyond the overflow point of e^a.
inline double lambert_w_log_halley(double a, double w) {
  for (int i = 0; i < 100; ++i) {
    const double g = w + std::log(w) - a;
    const double gp = 1.0 + 1.0 / w;              // g'
    const double gpp = -1.0 / (w * w);            // g''
    const double step = g / (gp - 0.5 * g * gpp / gp);
    double next = w - step;
    if (next <= 0.0) next = 0.5 * w;  // keep the iterate in the domain
    const double done = std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next));
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace detail

// W(e^a) on the principal branch. Valid for any finite a; the result solves
// w + log w = a to roughly machine precision in a.
inline double lambert_w_exp(double a) {
  if (!std::isfinite(a)) {
    if (std::isnan(a)) return a;
    return a > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  // W(e^a) = e^a (1 - e^a + ...), so below this point e^a is exact in double.
  if (a < -36.0) return std::exp(a);
  double w;
  if (a <= 1.0) {
    w = std::log1p(std::exp(a));  // = log(1 + z) with z = e^a
  } else {
    const double la = std::log(a);
    w = a - la + la / a;  // asymptotic expansion of W(e^a)
  }
  return detail::lambert_w_log_halley(a, w);
}

// Principal-branch Lambert W: w * e^w = z, z >= -1/e.
inline double lambert_w(double z) {
  constexpr double neg_inv_e = -0.36787944117144232159552377016146;
  if (std::isnan(z)) return z;
  if (z < neg_inv_e - 1e-15) throw std::domain_error("lambert_w: argument below -1/e");
  if (z == 0.0) return 0.0;
  if (z > 0.0) return lambert_w_exp(std::log(z));

  if (z <= neg_inv_e) return -1.0;
  // z in (-1/e, 0): Halley on f(w) = w e^w - z. Series guess near the branch
  // point, w ~ z elsewhere.
  double w;
  if (z < -0.25) {
    const double q = 2.0 * (1.0 + std::exp(1.0) * z);
    w = -1.0 + std::sqrt(q > 0 ? q : 0.0);
  } else {
    w = z * (1.0 - z);
  }
  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double next = w - f / denom;
    const double done = std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next));
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace iwlearn
