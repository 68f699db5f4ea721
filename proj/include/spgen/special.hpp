#pragma once

#include <cmath>

namespace spgen {

inline constexpr double kSqrtPi = 1.7724538509055160273;

/// Erf(x) + 1 evaluated through the complementary kernel so the result stays
/// accurate on the far-negative side, where Erf(x)+1 underflows gracefully
/// instead of cancelling. Saturates exactly beyond |x| > 9.
inline double erf_plus_one(double x) {
  if (x >= 9.0) return 2.0;
  if (x <= -9.0) return 0.0;
  return std::erfc(-x);
}

/// coeff * exp(-x2), switching to log-space when the prefactor is extreme so
/// that huge-coefficient / tiny-exponential products neither overflow nor
/// collapse to inf*0.
inline double exp_weighted(double coeff, double x2) {
  if (coeff == 0.0) return 0.0;
  const double mag = std::abs(coeff);
  if (x2 > 600.0 || mag > 1e300) {
    const double log_term = std::log(mag) - x2;
    if (log_term < -745.0) return 0.0;
    return std::copysign(std::exp(log_term), coeff);
  }
  return coeff * std::exp(-x2);
}

}  // namespace spgen
