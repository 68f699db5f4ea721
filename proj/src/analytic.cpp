#include "spgen/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spgen/quadrature.hpp"
#include "spgen/special.hpp"

namespace spgen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_ps(const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  if (!(ps > 0.0)) throw std::domain_error("ps must be > 0");
  const double bound = ps_max(p, pulse);
  if (ps > bound * (1.0 + 1e-9))
    throw std::domain_error("ps exceeds the success-probability bound ps_max");
}

// One candidate of the success-probability bound: the value of ps at which
// rho_uu first touches zero at stationary point tm.
double ps_bound_candidate(double tm, const AtomCavityParams& p, double tau) {
  const double kappa = p.kappa();
  const double c = p.cooperativity();
  const double x = tm / tau;
  const double d1 =
      (2.0 * c + 1.0 + 1.0 / (2.0 * kappa * kappa * tau * tau)) * 0.5 * erf_plus_one(x);
  const double bracket = (tm / (tau * tau) - p.gamma - 2.0 * kappa) * tm +
                         kappa * kappa * tau * tau +
                         2.0 * kappa * p.gamma * tau * tau * (c + 1.0);
  const double d2 =
      exp_weighted(bracket / (2.0 * kSqrtPi * kappa * kappa * p.gamma * tau * tau * tau),
                   x * x);
  const double denom = d1 + d2;
  if (!(denom > 0.0)) return kInf;  // constraint not binding at this candidate
  return p.eta_esc() * 2.0 * c / denom;
}

}  // namespace

namespace detail {

double rho_gg_kernel(double t, const AtomCavityParams& p, double tau, double ps) {
  const double x = t / tau;
  return exp_weighted(ps / (2.0 * kSqrtPi * p.kappa_ex * tau), x * x);
}

double rho_ee_kernel(double t, const AtomCavityParams& p, double tau, double ps) {
  const double x = t / tau;
  const double k_minus = p.kappa() - t / (tau * tau);
  return exp_weighted(ps * k_minus * k_minus / (2.0 * kSqrtPi * p.kappa_ex * p.g * p.g * tau),
                      x * x);
}

double rho_uu_kernel(double t, const AtomCavityParams& p, double tau, double ps) {
  const double g2 = p.g * p.g;
  const double kappa = p.kappa();
  const double tau2 = tau * tau;
  const double x = t / tau;
  const double term1 = ps * (p.gamma + 2.0 * kappa * tau2 * (g2 + p.gamma * kappa)) *
                       erf_plus_one(x) / (4.0 * g2 * p.kappa_ex * tau2);
  const double poly = t * t - t * (p.gamma + 2.0 * kappa) * tau2 +
                      (g2 + kappa * (2.0 * p.gamma + kappa)) * tau2 * tau2;
  const double term2 =
      exp_weighted(ps * poly / (2.0 * kSqrtPi * p.kappa_ex * g2 * tau2 * tau2 * tau), x * x);
  return 1.0 - term1 - term2;
}

double rho_uu_dot_kernel(double t, const AtomCavityParams& p, double tau, double ps) {
  const double kappa = p.kappa();
  const double tau2 = tau * tau;
  const double x = t / tau;
  // cubic factor (t - t0) [(t - c)^2 - tau^2 disc], valid for either sign of
  // the discriminant
  const double c = 0.5 * (kappa + p.gamma) * tau2;
  const double disc = 1.0 - tau2 * (p.g * p.g - 0.25 * (kappa - p.gamma) * (kappa - p.gamma));
  const double cubic = (t - kappa * tau2) * ((t - c) * (t - c) - tau2 * disc);
  const double pref = ps / (p.g * p.g * p.kappa_ex * tau2 * tau2 * tau2 * tau * kSqrtPi);
  return exp_weighted(pref * cubic, x * x);
}

}  // namespace detail

double waveform_w0(double t, const PulseSpec& pulse) {
  const double tau = pulse.tau;
  return std::pow(kSqrtPi * tau, -0.5) * std::exp(-t * t / (2.0 * tau * tau));
}

double rho_gg(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  validate_ps(p, pulse, ps);
  return detail::rho_gg_kernel(t, p, pulse.tau, ps);
}

double rho_ee(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  validate_ps(p, pulse, ps);
  return detail::rho_ee_kernel(t, p, pulse.tau, ps);
}

double rho_uu(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  validate_ps(p, pulse, ps);
  return detail::rho_uu_kernel(t, p, pulse.tau, ps);
}

double rho_uu_dot(double t, const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  validate_ps(p, pulse, ps);
  return detail::rho_uu_dot_kernel(t, p, pulse.tau, ps);
}

double rho_uu_integral_form(double t, const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, double abs_tol) {
  validate_ps(p, pulse, ps);
  const double tau = pulse.tau;
  const auto flow = [&](double s) {
    return p.gamma * detail::rho_ee_kernel(s, p, tau, ps) +
           p.kappa() * detail::rho_gg_kernel(s, p, tau, ps);
  };
  const double lost = integrate_adaptive(flow, pulse.window_start(), t, abs_tol).value;
  return 1.0 - detail::rho_ee_kernel(t, p, tau, ps) - detail::rho_gg_kernel(t, p, tau, ps) -
         2.0 * lost;
}

CriticalTimes critical_times(const AtomCavityParams& p, const PulseSpec& pulse) {
  const double tau = pulse.tau;
  const double tau2 = tau * tau;
  const double kappa = p.kappa();
  const double half_diff = 0.5 * (kappa - p.gamma);
  CriticalTimes ct;
  ct.t0 = kappa * tau2;
  ct.discriminant = 1.0 - tau2 * (p.g * p.g - half_diff * half_diff);
  if (ct.discriminant >= 0.0) {
    const double center = 0.5 * (kappa + p.gamma) * tau2;
    const double offset = tau * std::sqrt(ct.discriminant);
    ct.t_plus = center + offset;
    ct.t_minus = center - offset;
  }
  return ct;
}

double ps_ub(const AtomCavityParams& p) {
  const double c = p.cooperativity();
  return p.eta_esc() * 2.0 * c / (2.0 * c + 1.0);
}

PsMaxResult ps_max_detail(const AtomCavityParams& p, const PulseSpec& pulse) {
  const double tau = pulse.tau;
  const CriticalTimes ct = critical_times(p, pulse);
  std::vector<double> cands{ct.t0};
  if (ct.t_plus) cands.push_back(*ct.t_plus);
  if (ct.t_minus) cands.push_back(*ct.t_minus);

  PsMaxResult res{};
  res.deduplicated = false;
  std::vector<double> unique;
  for (double c : cands) {
    bool dup = false;
    for (double u : unique)
      if (std::abs(c - u) < 1e-12 * tau) { dup = true; break; }
    if (dup) res.deduplicated = true;
    else unique.push_back(c);
  }
  res.candidates = static_cast<int>(unique.size());

  double best = kInf, best_t = unique.front();
  for (double tm : unique) {
    const double v = ps_bound_candidate(tm, p, tau);
    if (v < best) { best = v; best_t = tm; }
  }
  res.raw = best;
  res.t_m = best_t;
  const double ub = ps_ub(p);
  res.clamped = best > ub;
  res.value = res.clamped ? ub : best;
  return res;
}

double ps_max(const AtomCavityParams& p, const PulseSpec& pulse) {
  return ps_max_detail(p, pulse).value;
}

double ps_finite_tau(const AtomCavityParams& p, const PulseSpec& pulse,
                     double rho_uu_inf) {
  if (!(rho_uu_inf >= 0.0 && rho_uu_inf < 1.0))
    throw std::domain_error("ps_finite_tau: rho_uu_inf must lie in [0, 1)");
  const double tau = pulse.tau;
  const double kappa = p.kappa();
  const double c = p.cooperativity();
  return (1.0 - rho_uu_inf) * 2.0 * c * p.kappa_ex * tau * tau /
         (1.0 / (2.0 * kappa) + (2.0 * c + 1.0) * kappa * tau * tau);
}

double rho_uu_infinite(const AtomCavityParams& p, const PulseSpec& pulse, double ps) {
  validate_ps(p, pulse, ps);
  const double tau = pulse.tau;
  const double kappa = p.kappa();
  const double c = p.cooperativity();
  return 1.0 - ps * (1.0 / kappa + 4.0 * c * kappa * tau * tau + 2.0 * kappa * tau * tau) /
                   (4.0 * c * p.kappa_ex * tau * tau);
}

double tau_critical(const AtomCavityParams& p) {
  const double kappa = p.kappa();
  return std::max(1.0 / kappa, kappa / (p.g * p.g));
}

}  // namespace spgen
