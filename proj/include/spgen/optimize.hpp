#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spgen/params.hpp"

namespace spgen {

/// Result of an external-rate optimization.
struct Optimum {
  enum class Method { ClosedForm, Numeric };
  double kappa_ex_opt = 0.0;
  double ps_opt = 0.0;
  Method method = Method::Numeric;
  double bracket_lo = 0.0;       ///< searched bounds
  double bracket_hi = 0.0;
  int refine_iterations = 0;
  bool boundary_hit = false;     ///< optimum pinned at a search bound
};

/// One sweep axis: uniformly spaced values, linear or logarithmic.
struct AxisSpec {
  std::string name;
  bool log = true;
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  Eigen::ArrayXd values() const;
  void validate() const;
};

/// Dense 2-D sweep output plus named overlay curves (reference lines, ridge
/// positions) and the fixed parameters that produced it.
struct SweepResult {
  AxisSpec axis1, axis2;
  std::vector<std::pair<std::string, double>> fixed;
  Eigen::ArrayXXd ps;        ///< axis1.count x axis2.count
  Eigen::ArrayXXd kex_opt;   ///< NaN where not applicable
  Eigen::ArrayXXi regime;    ///< static_cast<int>(Regime), -1 where untagged
  std::vector<std::pair<std::string, Eigen::ArrayX2d>> overlays;
};

/// Closed-form adiabatic optimum of the external rate at fixed internal loss.
Optimum kex_opt_adiabatic(double kappa_in, double c_in);

/// Numeric optimum of the success-probability bound over kappa_ex at fixed
/// (g, gamma, kappa_in, tau): coarse logarithmic scan then golden-section
/// refinement.
Optimum kex_opt_numeric(double g, double gamma, double kappa_in, const PulseSpec& pulse,
                        std::pair<double, double> bounds, int coarse_points = 200);

/// Success-probability bound over (gamma*tau, g/kappa) at fixed (C, eta_esc).
SweepResult sweep_fig2(double c, double eta_esc, const AxisSpec& gamma_tau,
                       const AxisSpec& g_over_kappa, int threads = 0);

/// Bound over (tau, kappa_ex/kappa_in) at fixed internal cooperativity, with
/// the per-tau ridge of the optimal external rate.
SweepResult sweep_fig6(double c_in, double kappa_in_over_gamma, const AxisSpec& tau,
                       const AxisSpec& kex_over_kin, int threads = 0);

/// Transmittance-optimized bound over (tau, cavity length) for a physical
/// cavity of fixed internal cooperativity.
SweepResult sweep_fig7(double c_in, double a_eff_tilde, double alpha_loss, double gamma,
                       const AxisSpec& tau, const AxisSpec& l_cav, int threads = 0);

/// Design-condition report for a physical cavity: recommended transmittance,
/// cavity-length bound, and pulse-width margin against the critical width.
struct DesignReport {
  double t_ex_recommended;  ///< sqrt(2 alpha_loss / a_eff_tilde)
  double cond1_ratio;       ///< actual T_ex over recommendation
  bool cond1_pass;          ///< within a factor 2 of the recommendation
  double cond2_margin;      ///< (alpha_loss / 4 gamma) / L_cav
  bool cond2_pass;
  double tau_c;             ///< critical pulse width at the given rates
  double tau;               ///< NaN when no pulse width was supplied
  double cond3_margin;      ///< tau / tau_c, NaN when tau missing
  bool cond3_pass;
  AtomCavityParams rates;
};

DesignReport design_conditions(const PhysicalCavity& cav, double gamma,
                               double tau = std::numeric_limits<double>::quiet_NaN());

}  // namespace spgen
