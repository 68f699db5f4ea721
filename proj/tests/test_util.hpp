#pragma once

#include <random>

#include "spgen/params.hpp"

namespace spgen::testing {

// Regime points used throughout the figures: fixed C = 10, eta_esc = 0.95.
inline AtomCavityParams fig_point(double g_over_kappa) {
  return resolve_from_ratios(g_over_kappa, 10.0, 0.95, 1.0);
}

inline double log_uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace spgen::testing
