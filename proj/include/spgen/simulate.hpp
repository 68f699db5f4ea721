#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "spgen/drive.hpp"
#include "spgen/params.hpp"

namespace spgen {

/// Time-sampled solution of the three coupled amplitude equations, with
/// cumulative emission (through the output coupler) and spontaneous-decay
/// bookkeeping.
struct Trajectory {
  Eigen::ArrayXd grid;
  Eigen::ArrayXcd alpha_u;
  Eigen::ArrayXcd alpha_e;
  Eigen::ArrayXcd alpha_g;
  Eigen::ArrayXd emitted;  ///< 2 kappa_ex * integral of |alpha_g|^2
  Eigen::ArrayXd decayed;  ///< 2 gamma * integral of |alpha_e|^2
};

/// Adaptive step-size underflow (or step budget exhausted) at time().
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(double t, const std::string& what)
      : std::runtime_error(what), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

struct IntegrateOptions {
  double tol = 1e-10;             ///< local error target, in [1e-12, 1e-4]
  long max_steps = 50'000'000;
  Eigen::Vector3cd initial{1.0, 0.0, 0.0};  ///< (alpha_u, alpha_e, alpha_g) at start
};

/// Integrate the amplitude equations forward with the given drive, sampling
/// the solution at every drive-grid point inside t_span. Embedded adaptive
/// (4)5-order pair; the drive is interpolated cubically between its samples.
Trajectory integrate(const AtomCavityParams& p, const Detunings& d,
                     const DriveWaveform& drive, std::pair<double, double> t_span,
                     const IntegrateOptions& opts = {});

/// Emission probability 2 kappa_ex * integral |alpha_g|^2 over the stored
/// samples (fourth-order corrected trapezoid).
double success_probability(const Trajectory& traj, double kappa_ex);

/// Emitted temporal mode sqrt(2 kappa_ex) * alpha_g(t).
Eigen::ArrayXcd output_waveform(const Trajectory& traj, double kappa_ex);

/// Normalized mode overlap |<a|b>|^2 / (<a|a><b|b>) of two waveforms sampled
/// on a common grid; 1 iff proportional.
double mode_overlap(const Eigen::ArrayXd& grid, const Eigen::ArrayXcd& a,
                    const Eigen::ArrayXcd& b);

/// Overlap of waveforms on different grids; b is resampled onto grid_a.
double mode_overlap(const Eigen::ArrayXd& grid_a, const Eigen::ArrayXcd& a,
                    const Eigen::ArrayXd& grid_b, const Eigen::ArrayXcd& b);

}  // namespace spgen
