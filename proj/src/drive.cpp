#include "spgen/drive.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "spgen/analytic.hpp"
#include "spgen/interpolate.hpp"
#include "spgen/quadrature.hpp"
#include "spgen/special.hpp"

namespace spgen {

namespace {

using cplx = std::complex<double>;

double wrap_pm_pi(double dphi) {
  return dphi - 2.0 * M_PI * std::round(dphi / (2.0 * M_PI));
}

void check_ps_margin(const AtomCavityParams& p, const PulseSpec& pulse, double ps,
                     const DriveOptions& opts) {
  if (!(ps > 0.0)) throw std::domain_error("drive synthesis: ps must be > 0");
  const double limit = opts.safety_fraction * ps_max(p, pulse);
  if (ps > limit * (1.0 + 1e-12))
    throw std::domain_error(
        "drive synthesis: ps exceeds " + std::to_string(opts.safety_fraction) +
        " * ps_max; the control field diverges as the uncoupled population "
        "touches zero, so a safety margin below the bound is required");
}

Eigen::ArrayXd uniform_grid(const PulseSpec& pulse, Eigen::Index n) {
  return Eigen::ArrayXd::LinSpaced(n, pulse.window_start(), pulse.window_end());
}

// Closed-form field evaluators for the Gaussian output pulse. Everything the
// synthesis needs is available at arbitrary t, which keeps the phase
// quadrature adaptive instead of grid-bound.
struct GaussianFields {
  const AtomCavityParams p;
  const double tau;
  const double ps;
  const Detunings d;
  const double amp;  // sqrt(ps / (2 kappa_ex))

  GaussianFields(const AtomCavityParams& p_, const PulseSpec& pulse, double ps_,
                 const Detunings& d_)
      : p(p_), tau(pulse.tau), ps(ps_), d(d_),
        amp(std::sqrt(ps_ / (2.0 * p_.kappa_ex))) {}

  double w0(double t) const {
    return std::pow(kSqrtPi * tau, -0.5) * std::exp(-t * t / (2.0 * tau * tau));
  }
  double ag(double t) const { return amp * w0(t); }
  double dag(double t) const { return -t / (tau * tau) * ag(t); }
  double d2ag(double t) const {
    const double r = t / (tau * tau);
    return (r * r - 1.0 / (tau * tau)) * ag(t);
  }
  double d3ag(double t) const {
    const double tau2 = tau * tau;
    return (3.0 * t / (tau2 * tau2) - t * t * t / (tau2 * tau2 * tau2)) * ag(t);
  }
  double ae(double t) const { return -(dag(t) + p.kappa() * ag(t)) / p.g; }
  double dae(double t) const { return -(d2ag(t) + p.kappa() * dag(t)) / p.g; }
  double d2ae(double t) const { return -(d3ag(t) + p.kappa() * d2ag(t)) / p.g; }
  cplx z(double t) const {
    return cplx(dae(t) + p.gamma * ae(t) - p.g * ag(t), d.delta_e * ae(t));
  }
  cplx dz(double t) const {
    return cplx(d2ae(t) + p.gamma * dae(t) - p.g * dag(t), d.delta_e * dae(t));
  }
  double ruu(double t) const { return detail::rho_uu_kernel(t, p, tau, ps); }
  double druu(double t) const { return detail::rho_uu_dot_kernel(t, p, tau, ps); }
};

// Phase rate of the uncoupled amplitude, regular everywhere the population
// stays positive.
template <typename F>
double phi_u_rate_regular(const F& f, double t, double delta_u) {
  const double r = f.ruu(t);
  const cplx w = cplx(f.ae(t)) * std::conj(f.z(t));
  return -delta_u - w.imag() / r;
}

// Literal phase-integral quotient with a guarded fallback to the regular form
// where the denominator vanishes (stationary points of the population).
template <typename F>
double phi_u_rate_quotient(const F& f, double t, double delta_u) {
  const cplx ae = f.ae(t);
  const cplx z = f.z(t);
  const double r = f.ruu(t);
  if (!(r > 0.0))
    throw std::runtime_error("drive synthesis: uncoupled population not positive at t=" +
                             std::to_string(t));
  const cplx y(f.druu(t) / (2.0 * r), delta_u);
  const double num = (std::conj(ae) * y * z).imag();
  const double den = (std::conj(ae) * z).real();
  const double scale = std::abs(ae) * std::abs(z);
  if (std::abs(den) > 1e-9 * scale) return -num / den;
  if (scale > 0.0 && std::abs(num) > 1e-6 * scale * (1.0 + std::abs(y)))
    throw DriveSingularity(t,
        "drive synthesis: singular phase integrand at t=" + std::to_string(t));
  return phi_u_rate_regular(f, t, delta_u);
}

// Phase of z per sample, unwrapped. Samples whose magnitude falls below the
// clamp threshold at the window edges inherit the nearest healthy phase so
// edge noise cannot derail the unwrapping.
Eigen::ArrayXd unwrap_arg(const Eigen::ArrayXcd& z, const Eigen::ArrayXd& mag,
                          double clamp_level) {
  const Eigen::Index n = z.size();
  Eigen::ArrayXd raw(n);
  for (Eigen::Index i = 0; i < n; ++i) raw[i] = std::arg(z[i]);
  Eigen::Index first = 0, last = n - 1;
  while (first < n && mag[first] <= clamp_level) ++first;
  while (last > 0 && mag[last] <= clamp_level) --last;
  if (first >= last) return Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = 0; i < first; ++i) raw[i] = raw[first];
  for (Eigen::Index i = last + 1; i < n; ++i) raw[i] = raw[last];
  Eigen::ArrayXd out(n);
  out[0] = raw[0];
  for (Eigen::Index i = 1; i < n; ++i)
    out[i] = out[i - 1] + wrap_pm_pi(raw[i] - raw[i - 1]);
  return out;
}

template <typename F>
Eigen::Index required_samples(const F& f, const PulseSpec& pulse, double delta_u,
                              const DriveOptions& opts) {
  const Eigen::Index n_probe = 4096;
  const Eigen::ArrayXd probe = uniform_grid(pulse, n_probe);
  double zmax = 0.0;
  for (Eigen::Index i = 0; i < n_probe; ++i) zmax = std::max(zmax, std::abs(f.z(probe[i])));
  double max_rate = 0.0;
  for (Eigen::Index i = 0; i < n_probe; ++i) {
    const double t = probe[i];
    const double pu = phi_u_rate_regular(f, t, delta_u);
    const cplx z = f.z(t);
    const double z2 = std::norm(z);
    double arg_rate = 0.0;
    if (z2 > 1e-24 * zmax * zmax) arg_rate = (f.dz(t) * std::conj(z)).imag() / z2;
    max_rate = std::max({max_rate, std::abs(pu), std::abs(arg_rate - pu)});
  }
  const double span = pulse.window_end() - pulse.window_start();
  double needed = span * max_rate / opts.max_phase_step;
  Eigen::Index n = opts.min_samples;
  while (n < needed && n < opts.max_samples) n *= 2;
  if (n < needed)
    throw std::domain_error(
        "drive synthesis: detunings require more samples than max_samples; "
        "reduce the detunings or the pulse window");
  return n;
}

template <typename F>
DriveWaveform synthesize(const F& f, const PulseSpec& pulse, const Detunings& d,
                         const DriveOptions& opts, Eigen::Index n) {
  DriveWaveform out;
  out.grid = uniform_grid(pulse, n);
  out.omega_mag.resize(n);
  Eigen::ArrayXcd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = out.grid[i];
    const double r = f.ruu(t);
    if (!(r > 0.0))
      throw std::runtime_error(
          "drive synthesis: uncoupled population not positive at t=" + std::to_string(t));
    z[i] = f.z(t);
    out.omega_mag[i] = std::abs(z[i]) / std::sqrt(r);
  }
  const double clamp_level = opts.clamp_fraction * out.omega_mag.maxCoeff();
  const auto rate = [&](double t) { return phi_u_rate_quotient(f, t, d.delta_u); };
  out.phi_u = cumulative_integral(rate, out.grid, 1e-10);
  const Eigen::ArrayXd theta = unwrap_arg(z, out.omega_mag, clamp_level);
  out.omega_phase = theta - out.phi_u;
  for (Eigen::Index i = 0; i < n; ++i)
    if (out.omega_mag[i] < clamp_level) out.omega_mag[i] = 0.0;
  return out;
}

}  // namespace

Eigen::ArrayXcd DriveWaveform::omega() const {
  Eigen::ArrayXcd w(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    w[i] = std::polar(omega_mag[i], omega_phase[i]);
  return w;
}

DriveWaveform drive_resonant(const AtomCavityParams& p, const PulseSpec& pulse,
                             double ps, const DriveOptions& opts) {
  check_ps_margin(p, pulse, ps, opts);
  const double tau = pulse.tau;
  const Eigen::Index n = opts.min_samples;
  const CriticalTimes ct = critical_times(p, pulse);

  DriveWaveform out;
  out.grid = uniform_grid(pulse, n);
  out.phi_u = Eigen::ArrayXd::Zero(n);
  out.omega_mag.resize(n);
  out.omega_phase.resize(n);

  const double pref_denom = p.g * std::pow(tau, 4.5) * std::sqrt(2.0 * p.kappa_ex * kSqrtPi);
  Eigen::ArrayXd value(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = out.grid[i];
    // numerator roots: product form when real, shifted-square form when the
    // root pair is complex (keeps the field real)
    double quad;
    if (ct.t_plus) {
      quad = (t - *ct.t_plus) * (t - *ct.t_minus);
    } else {
      const double center = 0.5 * (p.kappa() + p.gamma) * tau * tau;
      quad = (t - center) * (t - center) + tau * tau * (-ct.discriminant);
    }
    const double r = detail::rho_uu_kernel(t, p, tau, ps);
    if (!(r > 0.0))
      throw std::runtime_error(
          "drive synthesis: uncoupled population not positive at t=" + std::to_string(t));
    value[i] = std::sqrt(ps) * std::exp(-t * t / (2.0 * tau * tau)) * quad /
               (pref_denom * std::sqrt(r));
  }
  const double clamp_level = opts.clamp_fraction * value.abs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::abs(value[i]) < clamp_level ? 0.0 : value[i];
    out.omega_mag[i] = std::abs(v);
    out.omega_phase[i] = v < 0.0 ? M_PI : 0.0;
  }
  return out;
}

DriveWaveform drive_detuned(const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, const Detunings& d, const DriveOptions& opts) {
  check_ps_margin(p, pulse, ps, opts);
  const GaussianFields f(p, pulse, ps, d);
  const Eigen::Index n = required_samples(f, pulse, d.delta_u, opts);
  return synthesize(f, pulse, d, opts, n);
}

namespace {

// Sampled-field evaluators for user-supplied waveforms: cubic interpolants
// over the resampled arrays, derivatives from finite differences.
struct SampledFields {
  ComplexInterpolant ae_i, z_i;
  RealInterpolant ruu_i, druu_i;

  cplx ae(double t) const { return ae_i(t); }
  cplx z(double t) const { return z_i(t); }
  double ruu(double t) const { return ruu_i(t); }
  double druu(double t) const { return druu_i(t); }
};

}  // namespace

DriveWaveform drive_detuned(const AtomCavityParams& p, const PulseSpec& pulse,
                            double ps, const Detunings& d, const WaveformSamples& w0,
                            double t_st, const DriveOptions& opts) {
  check_ps_margin(p, pulse, ps, opts);
  if (w0.t.size() != w0.value.size() || w0.t.size() < 8)
    throw std::domain_error("drive synthesis: waveform needs at least 8 samples");
  for (Eigen::Index i = 1; i < w0.t.size(); ++i)
    if (!(w0.t[i] > w0.t[i - 1]))
      throw std::domain_error("drive synthesis: waveform grid must be strictly increasing");
  const double t_end = -t_st;
  if (w0.t[0] > t_st + 1e-9 * pulse.tau || w0.t[w0.t.size() - 1] < t_end - 1e-9 * pulse.tau)
    throw std::domain_error("drive synthesis: waveform samples must cover the pulse window");

  const ComplexInterpolant w0_interp(w0.t, w0.value);

  Eigen::Index n = opts.min_samples;
  for (int attempt = 0;; ++attempt) {
    Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(n, t_st, t_end);
    const double h = grid[1] - grid[0];

    Eigen::ArrayXcd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = w0_interp(grid[i]);
    const double norm = integrate_samples<double>(grid, Eigen::ArrayXd(w.abs2()));
    if (std::abs(norm - 1.0) > 1e-3)
      throw std::domain_error("drive synthesis: waveform intensity must be normalized, got " +
                              std::to_string(norm));

    const double amp = std::sqrt(ps / (2.0 * p.kappa_ex));
    Eigen::ArrayXcd ag = amp * w;
    Eigen::ArrayXcd dag = fd_derivative<cplx>(ag, h);
    Eigen::ArrayXcd ae = -(dag + p.kappa() * ag) / p.g;
    Eigen::ArrayXcd dae = fd_derivative<cplx>(ae, h);
    Eigen::ArrayXcd z = dae + cplx(p.gamma, d.delta_e) * ae - p.g * ag;

    Eigen::ArrayXd rho_ee_s = ae.abs2();
    Eigen::ArrayXd rho_gg_s = ag.abs2();
    const RealInterpolant ee_i(grid, rho_ee_s), gg_i(grid, rho_gg_s);
    const auto flow = [&](double s) { return p.gamma * ee_i(s) + p.kappa() * gg_i(s); };
    Eigen::ArrayXd lost = cumulative_integral(flow, grid, 1e-12);
    Eigen::ArrayXd ruu = 1.0 - rho_ee_s - rho_gg_s - 2.0 * lost;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(ruu[i] > 0.0))
        throw std::runtime_error(
            "drive synthesis: uncoupled population not positive at t=" +
            std::to_string(grid[i]) + "; lower ps for this waveform");
    Eigen::ArrayXd dee = fd_derivative<double>(rho_ee_s, h);
    Eigen::ArrayXd dgg = fd_derivative<double>(rho_gg_s, h);
    Eigen::ArrayXd druu =
        -dee - dgg - 2.0 * (p.gamma * rho_ee_s + p.kappa() * rho_gg_s);

    SampledFields f{ComplexInterpolant(grid, ae), ComplexInterpolant(grid, z),
                    RealInterpolant(grid, ruu), RealInterpolant(grid, druu)};

    PulseSpec window(pulse.tau, -t_st / pulse.tau);
    DriveWaveform out = synthesize(f, window, d, opts, n);

    // densify until the per-sample phase steps respect the budget; steps near
    // pi are genuine sign flips, not under-sampled rotation
    bool under_sampled = false;
    for (Eigen::Index i = 1; i < n && !under_sampled; ++i) {
      const double d0 = std::abs(out.omega_phase[i] - out.omega_phase[i - 1]);
      const double du = std::abs(out.phi_u[i] - out.phi_u[i - 1]);
      if (du > 2.0 * opts.max_phase_step) under_sampled = true;
      if (std::min(d0, std::abs(d0 - M_PI)) > 2.0 * opts.max_phase_step)
        under_sampled = true;
    }
    if (!under_sampled || n >= opts.max_samples || attempt >= 4) return out;
    n = std::min<Eigen::Index>(n * 4, opts.max_samples);
  }
}

AmplitudeTriple amplitude_targets(const AtomCavityParams& p, const PulseSpec& pulse,
                                  double ps, const Detunings& d,
                                  const DriveOptions& opts) {
  check_ps_margin(p, pulse, ps, opts);
  const GaussianFields f(p, pulse, ps, d);
  const Eigen::Index n = opts.min_samples;
  AmplitudeTriple out;
  out.grid = uniform_grid(pulse, n);
  out.alpha_u.resize(n);
  out.alpha_e.resize(n);
  out.alpha_g.resize(n);
  out.z.resize(n);
  out.y.resize(n);

  Eigen::ArrayXd phi_u;
  if (d.delta_u != 0.0 || d.delta_e != 0.0) {
    const auto rate = [&](double t) { return phi_u_rate_quotient(f, t, d.delta_u); };
    phi_u = cumulative_integral(rate, out.grid, 1e-10);
  } else {
    phi_u = Eigen::ArrayXd::Zero(n);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = out.grid[i];
    const double r = f.ruu(t);
    out.alpha_u[i] = std::polar(std::sqrt(std::max(r, 0.0)), phi_u[i]);
    out.alpha_e[i] = f.ae(t);
    out.alpha_g[i] = f.ag(t);
    out.z[i] = f.z(t);
    out.y[i] = cplx(f.druu(t) / (2.0 * r), d.delta_u);
  }
  return out;
}

Eigen::ArrayXd phi_u_a11(const AtomCavityParams& p, const PulseSpec& pulse, double ps,
                         const Detunings& d, const Eigen::ArrayXd& grid) {
  const GaussianFields f(p, pulse, ps, Detunings{});
  const auto integrand = [&](double t) {
    const double ae = f.ae(t);
    return ae * ae / f.ruu(t);
  };
  Eigen::ArrayXd one_photon = cumulative_integral(integrand, grid, 1e-10);
  return -d.delta_u * (grid - grid[0]) + d.delta_e * one_photon;
}

}  // namespace spgen
