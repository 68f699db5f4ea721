#include "spgen/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spgen {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

bool finite(double x) { return std::isfinite(x); }

// Strict a > b resolved with relative tolerance; ties are not "greater".
bool definitely_greater(double a, double b) {
  return a - b > 1e-6 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Purcell: return "purcell";
    case Regime::Strong: return "strong";
    case Regime::WeakHighC: return "weak_high_c";
    case Regime::Intermediate: return "intermediate";
  }
  return "unknown";
}

AtomCavityParams::AtomCavityParams(double g_, double gamma_, double kappa_in_,
                                   double kappa_ex_)
    : g(g_), gamma(gamma_), kappa_in(kappa_in_), kappa_ex(kappa_ex_) {
  require(finite(g) && g > 0.0, "AtomCavityParams: g must be > 0");
  require(finite(gamma) && gamma > 0.0, "AtomCavityParams: gamma must be > 0");
  require(finite(kappa_in) && kappa_in >= 0.0, "AtomCavityParams: kappa_in must be >= 0");
  require(finite(kappa_ex) && kappa_ex > 0.0, "AtomCavityParams: kappa_ex must be > 0");
}

PulseSpec::PulseSpec(double tau_, double window_halfwidth_in_tau_)
    : tau(tau_), window_halfwidth_in_tau(window_halfwidth_in_tau_) {
  require(finite(tau) && tau > 0.0, "PulseSpec: tau must be > 0");
  require(finite(window_halfwidth_in_tau) && window_halfwidth_in_tau >= 4.0,
          "PulseSpec: window halfwidth must be >= 4 pulse widths");
}

Detunings::Detunings(double delta_u_, double delta_e_)
    : delta_u(delta_u_), delta_e(delta_e_) {
  require(finite(delta_u) && finite(delta_e), "Detunings: values must be finite");
}

PhysicalCavity::PhysicalCavity(double a_eff_tilde_, double l_cav_, double alpha_loss_,
                               double t_ex_)
    : a_eff_tilde(a_eff_tilde_), l_cav(l_cav_), alpha_loss(alpha_loss_), t_ex(t_ex_) {
  require(finite(a_eff_tilde) && a_eff_tilde > 0.0, "PhysicalCavity: a_eff_tilde must be > 0");
  require(finite(l_cav) && l_cav > 0.0, "PhysicalCavity: l_cav must be > 0");
  require(finite(alpha_loss) && alpha_loss > 0.0 && alpha_loss < 1.0,
          "PhysicalCavity: alpha_loss must be in (0, 1)");
  require(finite(t_ex) && t_ex > 0.0 && t_ex <= 1.0,
          "PhysicalCavity: t_ex must be in (0, 1]");
}

AtomCavityParams physical_to_rates(const PhysicalCavity& cav, double gamma) {
  require(finite(gamma) && gamma > 0.0, "physical_to_rates: gamma must be > 0");
  const double g = std::sqrt(gamma / (2.0 * cav.a_eff_tilde * cav.l_cav));
  const double kappa_in = cav.alpha_loss / (4.0 * cav.l_cav);
  const double kappa_ex = cav.t_ex / (4.0 * cav.l_cav);
  return {g, gamma, kappa_in, kappa_ex};
}

AtomCavityParams resolve_from_ratios(double g_over_kappa, double c, double eta_esc,
                                     double gamma) {
  require(finite(g_over_kappa) && g_over_kappa > 0.0,
          "resolve_from_ratios: g/kappa must be > 0");
  require(finite(c) && c > 0.0, "resolve_from_ratios: C must be > 0");
  require(finite(eta_esc) && eta_esc > 0.0 && eta_esc <= 1.0,
          "resolve_from_ratios: eta_esc must be in (0, 1]");
  require(finite(gamma) && gamma > 0.0, "resolve_from_ratios: gamma must be > 0");
  // C = g^2/(2 kappa gamma) with g = (g/kappa) kappa pins both rates.
  const double g = 2.0 * c * gamma / g_over_kappa;
  const double kappa = g / g_over_kappa;
  return {g, gamma, (1.0 - eta_esc) * kappa, eta_esc * kappa};
}

Regime classify_regime(const AtomCavityParams& p) {
  const double g = p.g;
  const double k = p.kappa();
  const double gam = p.gamma;
  if (definitely_greater(g, k) && definitely_greater(g, gam)) return Regime::Strong;
  if (definitely_greater(gam, g) && definitely_greater(g, k)) return Regime::WeakHighC;
  const double purcell_rate = g * g / k;
  if (definitely_greater(k, purcell_rate) && definitely_greater(purcell_rate, gam))
    return Regime::Purcell;
  return Regime::Intermediate;
}

}  // namespace spgen
