#pragma once

#include <limits>
#include <string_view>

#include <Eigen/Dense>

namespace spgen {

/// Coupling regime of the atom-cavity system, judged from (g, gamma, kappa).
/// Comparisons closer than a relative 1e-6 count as ties and fall back to
/// Intermediate.
enum class Regime { Purcell, Strong, WeakHighC, Intermediate };

std::string_view to_string(Regime r);

/// The rate quadruple describing the atom-cavity system. All rates are in
/// inverse time; any consistent unit system works (the CLI defaults to
/// gamma = 1). Immutable after construction.
struct AtomCavityParams {
  double g;         ///< atom-cavity coupling rate
  double gamma;     ///< atomic polarization decay rate
  double kappa_in;  ///< internal cavity field decay rate
  double kappa_ex;  ///< external (output-coupler) cavity field decay rate

  AtomCavityParams(double g_, double gamma_, double kappa_in_, double kappa_ex_);

  double kappa() const { return kappa_in + kappa_ex; }
  double cooperativity() const { return g * g / (2.0 * kappa() * gamma); }
  double eta_esc() const { return kappa_ex / kappa(); }
  bool has_finite_c_in() const { return kappa_in > 0.0; }
  /// Internal cooperativity; +infinity in the lossless kappa_in = 0 limit.
  double c_in() const {
    return kappa_in > 0.0 ? g * g / (2.0 * kappa_in * gamma)
                          : std::numeric_limits<double>::infinity();
  }
};

/// Gaussian output pulse of width tau centered at t = 0, truncated to
/// [-N tau, +N tau].
struct PulseSpec {
  double tau;
  double window_halfwidth_in_tau;

  explicit PulseSpec(double tau_, double window_halfwidth_in_tau_ = 6.0);

  double window_start() const { return -window_halfwidth_in_tau * tau; }
  double window_end() const { return window_halfwidth_in_tau * tau; }
};

/// One-photon (delta_e) and two-photon (delta_u) detunings. (0, 0) is the
/// resonant case.
struct Detunings {
  double delta_u = 0.0;
  double delta_e = 0.0;

  Detunings() = default;
  Detunings(double delta_u_, double delta_e_);

  bool resonant() const { return delta_u == 0.0 && delta_e == 0.0; }
};

/// Physical one-sided-cavity description in natural units (c = hbar = 1,
/// lengths carry time units).
struct PhysicalCavity {
  double a_eff_tilde;  ///< effective mode area over scattering cross-section
  double l_cav;        ///< cavity length
  double alpha_loss;   ///< round-trip internal loss
  double t_ex;         ///< output-coupler transmittance

  PhysicalCavity(double a_eff_tilde_, double l_cav_, double alpha_loss_, double t_ex_);

  double c_in() const { return 1.0 / (a_eff_tilde * alpha_loss); }
};

/// Convert the physical cavity description to the rate quadruple.
AtomCavityParams physical_to_rates(const PhysicalCavity& cav, double gamma);

/// Build the rate quadruple realizing the requested dimensionless ratios
/// (g/kappa, C, eta_esc) at the given gamma.
AtomCavityParams resolve_from_ratios(double g_over_kappa, double c, double eta_esc,
                                     double gamma);

Regime classify_regime(const AtomCavityParams& p);

}  // namespace spgen
