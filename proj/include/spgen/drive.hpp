#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "spgen/params.hpp"

namespace spgen {

/// Control field magnitude/phase on a uniform time grid spanning the pulse
/// window. phi_u is the accumulated phase of the uncoupled-state amplitude
/// (zero in the resonant case). Phases are stored unwrapped.
struct DriveWaveform {
  Eigen::ArrayXd grid;
  Eigen::ArrayXd omega_mag;
  Eigen::ArrayXd omega_phase;
  Eigen::ArrayXd phi_u;

  Eigen::Index size() const { return grid.size(); }
  Eigen::ArrayXcd omega() const;
};

/// Target amplitudes and synthesis auxiliaries sampled on a grid. z is the
/// product drive*alpha_u demanded by the excited-state equation; y collects
/// the two-photon detuning and the logarithmic rate of the uncoupled
/// population.
struct AmplitudeTriple {
  Eigen::ArrayXd grid;
  Eigen::ArrayXcd alpha_u;
  Eigen::ArrayXcd alpha_e;
  Eigen::ArrayXcd alpha_g;
  Eigen::ArrayXcd z;
  Eigen::ArrayXcd y;
};

/// User-supplied output waveform, sampled (possibly complex).
struct WaveformSamples {
  Eigen::ArrayXd t;
  Eigen::ArrayXcd value;
};

struct DriveOptions {
  double safety_fraction = 0.99;   ///< refuse ps above this fraction of ps_max
  Eigen::Index min_samples = 4096;
  Eigen::Index max_samples = 1 << 20;
  double max_phase_step = 0.3;     ///< phase change per sample budget, radians
  double clamp_fraction = 1e-14;   ///< zero out |omega| below this * peak
};

/// Raised when the phase-integral quotient is singular at a sample while its
/// numerator stays finite (inconsistent input fields).
class DriveSingularity : public std::runtime_error {
 public:
  DriveSingularity(double t, const std::string& what)
      : std::runtime_error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

/// Real resonant control field producing the Gaussian output pulse.
DriveWaveform drive_resonant(const AtomCavityParams& p, const PulseSpec& pulse,
                             double ps, const DriveOptions& opts = {});

/// Detuned control field for the Gaussian output pulse. The grid densifies
/// automatically until the per-sample phase steps fit the budget.
DriveWaveform drive_detuned(const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, const Detunings& d,
                            const DriveOptions& opts = {});

/// Detuned control field for an arbitrary normalized output waveform given as
/// samples covering [t_st, -t_st]; derivatives come from fourth-order finite
/// differences.
DriveWaveform drive_detuned(const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, const Detunings& d,
                            const WaveformSamples& w0, double t_st,
                            const DriveOptions& opts = {});

/// Target amplitudes for the Gaussian output pulse (Gaussian derivatives
/// taken analytically).
AmplitudeTriple amplitude_targets(const AtomCavityParams& p, const PulseSpec& pulse,
                                  double ps, const Detunings& d = {},
                                  const DriveOptions& opts = {});

/// Closed reduction of the uncoupled-state phase for real output waveforms:
/// a linear two-photon term plus a one-photon quadrature. Cross-check for the
/// phase produced by drive_detuned.
Eigen::ArrayXd phi_u_a11(const AtomCavityParams& p, const PulseSpec& pulse, double ps,
                         const Detunings& d, const Eigen::ArrayXd& grid);

}  // namespace spgen
