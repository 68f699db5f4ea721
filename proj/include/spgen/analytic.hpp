#pragma once

#include <optional>

#include <Eigen/Dense>

#include "spgen/params.hpp"
#include "spgen/special.hpp"

namespace spgen {

/// Stationary-point candidates of the uncoupled-state population rho_uu.
/// t0 is always present; t_plus/t_minus exist only when the discriminant
/// 1 - tau^2 [g^2 - ((kappa-gamma)/2)^2] is non-negative.
struct CriticalTimes {
  double t0;
  std::optional<double> t_plus;
  std::optional<double> t_minus;
  double discriminant;
};

/// Success-probability bound together with evaluation diagnostics.
struct PsMaxResult {
  double value;        ///< bound, clamped into (0, ps_ub]
  double raw;          ///< unclamped minimum over candidates
  double t_m;          ///< binding stationary-point candidate
  bool clamped;        ///< true when round-off pushed raw above ps_ub
  bool deduplicated;   ///< true when candidates closer than 1e-12 tau merged
  int candidates;      ///< number of distinct real candidates evaluated
};

/// Normalized Gaussian output waveform of width tau, peak at t = 0.
double waveform_w0(double t, const PulseSpec& pulse);

/// Expression-friendly array overload.
template <typename Derived>
auto waveform_w0(const Eigen::ArrayBase<Derived>& t, const PulseSpec& pulse) {
  const double amp = std::pow(kSqrtPi * pulse.tau, -0.5);
  const double inv = 1.0 / (2.0 * pulse.tau * pulse.tau);
  return amp * (-t.derived().square() * inv).exp();
}

/// Populations of the three atomic levels under the Gaussian-output ansatz,
/// for emission probability ps. All require 0 < ps <= ps_max(p, pulse).
double rho_gg(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps);
double rho_ee(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps);
double rho_uu(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps);

/// Time derivative of rho_uu (closed form; the cubic-in-t factor carries the
/// stationary points).
double rho_uu_dot(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps);

/// rho_uu rebuilt from the population-flow bookkeeping by adaptive quadrature.
/// Cross-check oracle for the closed form; agrees to < 1e-8 absolute.
double rho_uu_integral_form(double t, const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, double abs_tol = 1e-10);

CriticalTimes critical_times(const AtomCavityParams& p, const PulseSpec& pulse);

/// Long-pulse upper bound eta_esc * 2C / (2C + 1).
double ps_ub(const AtomCavityParams& p);

/// Success-probability bound for the given parameters and pulse width:
/// minimum over the real stationary-point candidates of the
/// population-positivity constraint.
PsMaxResult ps_max_detail(const AtomCavityParams& p, const PulseSpec& pulse);
double ps_max(const AtomCavityParams& p, const PulseSpec& pulse);

/// Success probability for finite pulse width given the residual uncoupled
/// population after emission; rho_uu_inf must lie in [0, 1).
double ps_finite_tau(const AtomCavityParams& p, const PulseSpec& pulse,
                     double rho_uu_inf);

/// Residual rho_uu long after emission for a given ps (the t -> +infinity
/// limit of the closed form).
double rho_uu_infinite(const AtomCavityParams& p, const PulseSpec& pulse, double ps);

/// Critical pulse width max(1/kappa, kappa/g^2) separating the adiabatic and
/// nonadiabatic regimes.
double tau_critical(const AtomCavityParams& p);

namespace detail {
// Unvalidated kernels for hot loops; callers guarantee ps admissibility.
double rho_gg_kernel(double t, const AtomCavityParams& p, double tau, double ps);
double rho_ee_kernel(double t, const AtomCavityParams& p, double tau, double ps);
double rho_uu_kernel(double t, const AtomCavityParams& p, double tau, double ps);
double rho_uu_dot_kernel(double t, const AtomCavityParams& p, double tau, double ps);
}  // namespace detail

}  // namespace spgen
