#pragma once

#include <cmath>
#include <numbers>

namespace ambc {

/// Gaussian tail probability Q(x) = P[Z > x].
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double normal_cdf(double x) { return q_function(-x); }

/// log Q(x); switches to the asymptotic tail series where erfc underflows.
inline double log_q_function(double x) {
  if (x < 8.0) return std::log(q_function(x));
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

}  // namespace ambc
