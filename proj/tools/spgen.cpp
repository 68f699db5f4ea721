// spgen: success probabilities, drive synthesis, and cross-validation for
// cavity-QED single-photon generation with a Gaussian output pulse.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spgen/analytic.hpp"
#include "spgen/config.hpp"
#include "spgen/csv.hpp"
#include "spgen/drive.hpp"
#include "spgen/optimize.hpp"
#include "spgen/params.hpp"
#include "spgen/simulate.hpp"
#include "spgen/version.hpp"

namespace {

using namespace spgen;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerification = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  bool gamma_units = true;
  double tol = 1e-3;
  double ode_tol = 1e-10;
  double ps_fraction = 0.99;
  double min_overlap = 0.999;
  int grid = 0;
  int threads = 0;

  std::vector<double> tau_list;
  std::optional<double> g, gamma, kappa_in, kappa_ex;
  std::optional<double> delta_u, delta_e;
  std::optional<double> a_eff_tilde, l_cav, alpha_loss, t_ex;
  std::optional<double> g_over_kappa, c, eta_esc;

  std::string sweep_name;
  std::string axis1_spec, axis2_spec;
  std::optional<double> c_in, kappa_in_over_gamma;
  std::string w0_path;
  bool adiabatic = false;
  std::optional<double> kex_min, kex_max;

  RunConfig merged() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::parse_file(config_path);
    auto apply = [&](const char* key, const std::optional<double>& v) {
      if (v) cfg.set(key, *v);
    };
    apply("g", g);
    apply("gamma", gamma);
    apply("kappa_in", kappa_in);
    apply("kappa_ex", kappa_ex);
    if (!tau_list.empty()) cfg.tau = tau_list.front();
    apply("delta_u", delta_u);
    apply("delta_e", delta_e);
    apply("a_eff_tilde", a_eff_tilde);
    apply("l_cav", l_cav);
    apply("alpha_loss", alpha_loss);
    apply("t_ex", t_ex);
    return cfg;
  }

  double resolved_gamma(const RunConfig& cfg) const { return cfg.gamma.value_or(1.0); }

  AtomCavityParams rates(const RunConfig& cfg) const {
    const double gam = resolved_gamma(cfg);
    if (g_over_kappa || c || eta_esc) {
      if (!(g_over_kappa && c && eta_esc))
        throw UsageError("ratio mode needs all of --g-over-kappa, --c, --eta-esc");
      return resolve_from_ratios(*g_over_kappa, *c, *eta_esc, gam);
    }
    if (cfg.g && cfg.kappa_ex)
      return AtomCavityParams(*cfg.g, gam, cfg.kappa_in.value_or(0.0), *cfg.kappa_ex);
    if (cfg.a_eff_tilde && cfg.l_cav && cfg.alpha_loss && cfg.t_ex)
      return physical_to_rates(
          PhysicalCavity(*cfg.a_eff_tilde, *cfg.l_cav, *cfg.alpha_loss, *cfg.t_ex), gam);
    throw UsageError(
        "no parameter set: give (g, kappa_ex[, kappa_in]), or the ratio flags "
        "(--g-over-kappa, --c, --eta-esc), or the physical cavity keys");
  }

  PhysicalCavity cavity(const RunConfig& cfg) const {
    if (!(cfg.a_eff_tilde && cfg.l_cav && cfg.alpha_loss && cfg.t_ex))
      throw UsageError("physical cavity needs a_eff_tilde, l_cav, alpha_loss, t_ex");
    return PhysicalCavity(*cfg.a_eff_tilde, *cfg.l_cav, *cfg.alpha_loss, *cfg.t_ex);
  }

  std::vector<double> taus(const RunConfig& cfg) const {
    if (!tau_list.empty()) return tau_list;
    if (cfg.tau) return {*cfg.tau};
    throw UsageError("missing tau: pass --tau or set it in the config");
  }

  Detunings detunings(const RunConfig& cfg) const {
    return {cfg.delta_u.value_or(0.0), cfg.delta_e.value_or(0.0)};
  }

  std::string time_unit() const { return gamma_units ? "[1/gamma]" : "[time]"; }
  std::string rate_unit() const { return gamma_units ? "[gamma]" : "[rate]"; }
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key=value parameter file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--tol", o.tol, "verification tolerance on relative P_S error");
  cmd->add_option("--ode-tol", o.ode_tol, "integrator local error target");
  cmd->add_option("--grid", o.grid, "grid size override");
  cmd->add_option("--tau", o.tau_list, "pulse width(s)")->delimiter(',');
  cmd->add_option("--ps-fraction", o.ps_fraction, "requested P_S as a fraction of ps_max");
  cmd->add_option("--detuning-u", o.delta_u, "two-photon detuning");
  cmd->add_option("--detuning-e", o.delta_e, "one-photon detuning");
  cmd->add_flag("--gamma-units,!--absolute-units", o.gamma_units,
                "report times as gamma*t and rates in units of gamma (default on)");
  cmd->add_option("--threads", o.threads, "worker threads for sweeps (0 = auto)");
  cmd->add_option("--g", o.g, "atom-cavity coupling rate");
  cmd->add_option("--gamma", o.gamma, "atomic polarization decay rate");
  cmd->add_option("--kappa-in", o.kappa_in, "internal cavity decay rate");
  cmd->add_option("--kappa-ex", o.kappa_ex, "external cavity decay rate");
  cmd->add_option("--g-over-kappa", o.g_over_kappa, "coupling ratio g/kappa");
  cmd->add_option("--c", o.c, "cooperativity C");
  cmd->add_option("--eta-esc", o.eta_esc, "escape efficiency");
  cmd->add_option("--a-eff-tilde", o.a_eff_tilde, "dimensionless effective mode area");
  cmd->add_option("--l-cav", o.l_cav, "cavity length (natural units)");
  cmd->add_option("--alpha-loss", o.alpha_loss, "round-trip internal loss");
  cmd->add_option("--t-ex", o.t_ex, "output-coupler transmittance");
}

std::vector<std::pair<std::string, std::string>> describe_params(
    const AtomCavityParams& p, const std::vector<double>& taus, const Detunings& d) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"g", format_cell(p.g)},
      {"gamma", format_cell(p.gamma)},
      {"kappa_in", format_cell(p.kappa_in)},
      {"kappa_ex", format_cell(p.kappa_ex)},
      {"delta_u", format_cell(d.delta_u)},
      {"delta_e", format_cell(d.delta_e)},
  };
  for (std::size_t i = 0; i < taus.size(); ++i)
    out.emplace_back("tau" + (taus.size() > 1 ? std::to_string(i) : ""),
                     format_cell(taus[i]));
  return out;
}

// ---------------------------------------------------------------- psmax ----

int cmd_psmax(const Options& o) {
  const RunConfig cfg = o.merged();
  const AtomCavityParams p = o.rates(cfg);
  const std::vector<double> taus = o.taus(cfg);
  const double gam = p.gamma;
  const double ts = o.gamma_units ? gam : 1.0;

  CsvBuilder csv({"tau" + o.time_unit(), "ps_max[-]", "ps_ub[-]", "ratio[-]", "regime",
                  "tau_c" + o.time_unit(), "t_m" + o.time_unit()});
  const double ub = ps_ub(p);
  const double tc = tau_critical(p);
  const Regime regime = classify_regime(p);
  for (double tau : taus) {
    const PsMaxResult r = ps_max_detail(p, PulseSpec(tau));
    csv.add(tau * ts);
    csv.add(r.value);
    csv.add(ub);
    csv.add(r.value / ub);
    csv.add(to_string(regime));
    csv.add(tc * ts);
    csv.add(r.t_m * ts);
    csv.end_row();
    std::printf("tau=%-12.6g ps_max=%.9f ps_ub=%.9f ratio=%.6f regime=%s\n", tau * ts,
                r.value, ub, r.value / ub, std::string(to_string(regime)).c_str());
  }
  const auto rec = write_output(o.out_dir, "psmax.csv", csv.body());
  write_manifest(o.out_dir, "psmax", describe_params(p, taus, {}), {rec});
  return kExitOk;
}

// ------------------------------------------------------------- dynamics ----

int cmd_dynamics(const Options& o) {
  const RunConfig cfg = o.merged();
  const AtomCavityParams p = o.rates(cfg);
  const double tau = o.taus(cfg).front();
  const Detunings d = o.detunings(cfg);
  const PulseSpec pulse(tau);
  if (o.ps_fraction >= 1.0)
    throw std::domain_error(
        "ps-fraction must be < 1: the drive diverges at the bound itself");
  const double ps = o.ps_fraction * ps_max(p, pulse);

  DriveOptions dopts;
  if (o.grid > 0) dopts.min_samples = o.grid;
  const DriveWaveform drive =
      d.resonant() ? drive_resonant(p, pulse, ps, dopts) : drive_detuned(p, pulse, ps, d, dopts);
  const Eigen::ArrayXcd omega = drive.omega();

  const double ts = o.gamma_units ? p.gamma : 1.0;
  const double rs = o.gamma_units ? 1.0 / p.gamma : 1.0;
  CsvBuilder csv({"t" + o.time_unit(), "rho_uu[-]", "rho_ee[-]", "rho_gg[-]",
                  "omega_re" + o.rate_unit(), "omega_im" + o.rate_unit(),
                  "w0[sqrt(" + std::string(o.gamma_units ? "gamma" : "rate") + ")]"});
  for (Eigen::Index i = 0; i < drive.size(); ++i) {
    const double t = drive.grid[i];
    csv.add(t * ts);
    csv.add(detail::rho_uu_kernel(t, p, tau, ps));
    csv.add(detail::rho_ee_kernel(t, p, tau, ps));
    csv.add(detail::rho_gg_kernel(t, p, tau, ps));
    csv.add(omega[i].real() * rs);
    csv.add(omega[i].imag() * rs);
    csv.add(waveform_w0(t, pulse) * std::sqrt(rs));
    csv.end_row();
  }
  const auto rec = write_output(o.out_dir, "dynamics.csv", csv.body());
  auto params = describe_params(p, {tau}, d);
  params.emplace_back("ps", format_cell(ps));
  write_manifest(o.out_dir, "dynamics", params, {rec});
  std::printf("dynamics: %lld samples, ps=%.9f (%.2f%% of ps_max)\n",
              static_cast<long long>(drive.size()), ps, 100.0 * o.ps_fraction);
  return kExitOk;
}

// ---------------------------------------------------------------- drive ----

int cmd_drive(const Options& o) {
  const RunConfig cfg = o.merged();
  const AtomCavityParams p = o.rates(cfg);
  const double tau = o.taus(cfg).front();
  const Detunings d = o.detunings(cfg);
  const PulseSpec pulse(tau);
  const double ps = o.ps_fraction * ps_max(p, pulse);

  DriveOptions dopts;
  if (o.grid > 0) dopts.min_samples = o.grid;
  DriveWaveform drive;
  if (!o.w0_path.empty()) {
    const WaveformSamples w0 = read_waveform_csv(o.w0_path);
    drive = drive_detuned(p, pulse, ps, d, w0, w0.t[0], dopts);
  } else if (d.resonant()) {
    drive = drive_resonant(p, pulse, ps, dopts);
  } else {
    drive = drive_detuned(p, pulse, ps, d, dopts);
  }
  const auto rec =
      write_output(o.out_dir, "drive.csv", drive_to_csv(drive, o.gamma_units, p.gamma));
  auto params = describe_params(p, {tau}, d);
  params.emplace_back("ps", format_cell(ps));
  write_manifest(o.out_dir, "drive", params, {rec});
  std::printf("drive: %lld samples, peak |omega|=%.6g\n",
              static_cast<long long>(drive.size()), drive.omega_mag.maxCoeff());
  return kExitOk;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const Options& o) {
  const RunConfig cfg = o.merged();
  const AtomCavityParams p = o.rates(cfg);
  const double tau = o.taus(cfg).front();
  const Detunings d = o.detunings(cfg);
  const PulseSpec pulse(tau);
  const double ps = o.ps_fraction * ps_max(p, pulse);

  DriveOptions dopts;
  if (o.grid > 0) dopts.min_samples = o.grid;

  double rel = 0.0, overlap = 0.0, norm_resid = 0.0, recovered = 0.0;
  Eigen::Index samples = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const DriveWaveform drive = d.resonant() ? drive_resonant(p, pulse, ps, dopts)
                                             : drive_detuned(p, pulse, ps, d, dopts);
    IntegrateOptions iopts;
    iopts.tol = o.ode_tol;
    const Trajectory traj = integrate(p, d, drive,
                                      {pulse.window_start(), pulse.window_end()}, iopts);
    recovered = success_probability(traj, p.kappa_ex);
    rel = std::abs(recovered - ps) / ps;

    Eigen::ArrayXcd target(traj.grid.size());
    for (Eigen::Index i = 0; i < traj.grid.size(); ++i)
      target[i] = waveform_w0(traj.grid[i], pulse);
    overlap = mode_overlap(traj.grid, output_waveform(traj, p.kappa_ex), target);

    const double kappa_scale = p.kappa() / p.kappa_ex;
    norm_resid = 0.0;
    for (Eigen::Index i = 0; i < traj.grid.size(); ++i) {
      const double total = std::norm(traj.alpha_u[i]) + std::norm(traj.alpha_e[i]) +
                           std::norm(traj.alpha_g[i]) + traj.emitted[i] * kappa_scale +
                           traj.decayed[i];
      norm_resid = std::max(norm_resid, std::abs(total - 1.0));
    }
    samples = drive.size();
    if (overlap >= o.min_overlap || attempt == 1) break;
    dopts.min_samples *= 4;  // densify once and retry when the overlap misses
  }

  const bool pass = rel <= o.tol && overlap >= o.min_overlap && norm_resid <= 1e-6;
  CsvBuilder csv({"requested_ps[-]", "recovered_ps[-]", "rel_error[-]", "overlap[-]",
                  "norm_residual[-]", "samples[-]", "pass[-]"});
  csv.add(ps);
  csv.add(recovered);
  csv.add(rel);
  csv.add(overlap);
  csv.add(norm_resid);
  csv.add(static_cast<double>(samples));
  csv.add(pass ? "1" : "0");
  csv.end_row();
  const auto rec = write_output(o.out_dir, "verify.csv", csv.body());
  auto params = describe_params(p, {tau}, d);
  params.emplace_back("ps", format_cell(ps));
  params.emplace_back("tol", format_cell(o.tol));
  params.emplace_back("min_overlap", format_cell(o.min_overlap));
  write_manifest(o.out_dir, "verify", params, {rec});

  std::printf("verify: requested=%.9f recovered=%.9f rel=%.3e overlap=%.6f "
              "norm_residual=%.3e -> %s\n",
              ps, recovered, rel, overlap, norm_resid, pass ? "PASS" : "FAIL");
  if (!pass)
    throw VerificationFailure("verification tolerances not met (rel=" +
                              std::to_string(rel) + ", overlap=" + std::to_string(overlap) + ")");
  return kExitOk;
}

// ---------------------------------------------------------------- sweep ----

AxisSpec parse_axis(const std::string& spec, const std::string& fallback_name) {
  // name:min:max:count[:lin|log]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 4 || parts.size() > 5)
    throw UsageError("axis spec must be name:min:max:count[:lin|log], got '" + spec + "'");
  AxisSpec a;
  a.name = parts[0].empty() ? fallback_name : parts[0];
  a.min = std::stod(parts[1]);
  a.max = std::stod(parts[2]);
  a.count = std::stoi(parts[3]);
  a.log = parts.size() < 5 || parts[4] != "lin";
  return a;
}

AxisSpec default_log_axis(const std::string& name, double min, double max,
                          int count_override) {
  AxisSpec a{name, true, min, max, 0};
  const double decades = std::log10(max / min);
  a.count = count_override > 0 ? count_override
                               : static_cast<int>(std::lround(50.0 * decades)) + 1;
  return a;
}

std::string sweep_to_csv(const SweepResult& s, const Options& o) {
  CsvBuilder csv({s.axis1.name + (s.axis1.name == "tau" || s.axis1.name == "gamma_tau"
                                      ? o.time_unit()
                                      : "[-]"),
                  s.axis2.name + (s.axis2.name == "l_cav" ? o.time_unit() : "[-]"),
                  "ps_max[-]", "kappa_ex_opt" + o.rate_unit(), "regime"});
  const Eigen::ArrayXd v1 = s.axis1.values();
  const Eigen::ArrayXd v2 = s.axis2.values();
  for (Eigen::Index i = 0; i < v1.size(); ++i)
    for (Eigen::Index j = 0; j < v2.size(); ++j) {
      csv.add(v1[i]);
      csv.add(v2[j]);
      csv.add(s.ps(i, j));
      csv.add(s.kex_opt(i, j));
      const int r = s.regime(i, j);
      csv.add(r >= 0 ? to_string(static_cast<Regime>(r)) : std::string_view("-"));
      csv.end_row();
    }
  return csv.body();
}

std::string sweep_meta_json(const SweepResult& s, const std::string& name);

int cmd_sweep(const Options& o) {
  const int n = o.grid;
  SweepResult result;
  std::string name = o.sweep_name;
  if (name == "fig2" || (name.empty() && !o.axis1_spec.empty())) {
    const double c = o.c.value_or(10.0);
    const double eta = o.eta_esc.value_or(0.95);
    AxisSpec a1 = !o.axis1_spec.empty() ? parse_axis(o.axis1_spec, "gamma_tau")
                                        : default_log_axis("gamma_tau", 1e-3, 1e3, n);
    AxisSpec a2 = !o.axis2_spec.empty() ? parse_axis(o.axis2_spec, "g_over_kappa")
                                        : default_log_axis("g_over_kappa", 1e-2, 1e2, n);
    result = sweep_fig2(c, eta, a1, a2, o.threads);
    if (name.empty()) name = "custom";
  } else if (name == "fig6") {
    const double c_in = o.c_in.value_or(200.0);
    const double kin = o.kappa_in_over_gamma.value_or(1.0);
    const double root = std::sqrt(2.0 * c_in + 1.0);
    const double kub = kin * (1.0 + root);
    const double g = std::sqrt(2.0 * c_in * kin);
    const double tc = std::max(1.0 / kub, kub / (g * g));
    AxisSpec a1 = !o.axis1_spec.empty() ? parse_axis(o.axis1_spec, "tau")
                                        : default_log_axis("tau", 1e-2 * tc, 1e2 * tc, n);
    AxisSpec a2 = !o.axis2_spec.empty() ? parse_axis(o.axis2_spec, "kex_over_kin")
                                        : default_log_axis("kex_over_kin", 0.1 * root,
                                                           100.0 * root, n);
    result = sweep_fig6(c_in, kin, a1, a2, o.threads);
  } else if (name == "fig7") {
    const double c_in = o.c_in.value_or(200.0);
    const double a_eff = o.a_eff_tilde.value_or(5.0);
    const double loss = o.alpha_loss.value_or(1.0 / (c_in * 5.0));
    const double gam = o.gamma.value_or(1.0);
    const double l_ref = loss / (4.0 * gam);
    AxisSpec a1 = !o.axis1_spec.empty() ? parse_axis(o.axis1_spec, "tau")
                                        : default_log_axis("tau", 1e-2, 1e2, n);
    AxisSpec a2 = !o.axis2_spec.empty() ? parse_axis(o.axis2_spec, "l_cav")
                                        : default_log_axis("l_cav", 1e-3 * l_ref,
                                                           1e3 * l_ref, n);
    result = sweep_fig7(c_in, a_eff, loss, gam, a1, a2, o.threads);
  } else {
    throw UsageError("unknown sweep '" + name + "': expected fig2, fig6, fig7, or custom axes");
  }

  const std::string stem = "sweep_" + name;
  const auto rec = write_output(o.out_dir, stem + ".csv", sweep_to_csv(result, o));
  const auto meta = write_output(o.out_dir, stem + "_meta.json",
                                 sweep_meta_json(result, name));
  std::vector<std::pair<std::string, std::string>> params;
  for (const auto& [k, v] : result.fixed) params.emplace_back(k, format_cell(v));
  write_manifest(o.out_dir, "sweep", params, {rec, meta});
  std::printf("sweep %s: %d x %d cells -> %s.csv\n", name.c_str(), result.axis1.count,
              result.axis2.count, stem.c_str());
  return kExitOk;
}

// --------------------------------------------------------------- design ----

int cmd_design(const Options& o) {
  const RunConfig cfg = o.merged();
  const PhysicalCavity cav = o.cavity(cfg);
  const double gam = o.resolved_gamma(cfg);
  const double tau = cfg.tau.value_or(std::numeric_limits<double>::quiet_NaN());
  const DesignReport r = design_conditions(cav, gam, tau);

  CsvBuilder csv({"item", "value[-]", "target[-]", "margin[-]", "pass[-]"});
  csv.add("t_ex_recommended");
  csv.add(r.t_ex_recommended);
  csv.add("-");
  csv.add("-");
  csv.add("-");
  csv.end_row();
  csv.add("cond1_transmittance_ratio");
  csv.add(r.cond1_ratio);
  csv.add("within factor 2 of 1");
  csv.add(r.cond1_ratio >= 1.0 ? r.cond1_ratio : 1.0 / r.cond1_ratio);
  csv.add(r.cond1_pass ? "1" : "0");
  csv.end_row();
  csv.add("cond2_cavity_length");
  csv.add(cav.l_cav);
  csv.add(format_cell(cav.alpha_loss / (4.0 * gam)));
  csv.add(r.cond2_margin);
  csv.add(r.cond2_pass ? "1" : "0");
  csv.end_row();
  csv.add("cond3_pulse_width");
  csv.add(r.tau);
  csv.add(format_cell(r.tau_c));
  csv.add(r.cond3_margin);
  csv.add(r.cond3_pass ? "1" : "0");
  csv.end_row();

  const auto rec = write_output(o.out_dir, "design.csv", csv.body());
  write_manifest(o.out_dir, "design",
                 {{"a_eff_tilde", format_cell(cav.a_eff_tilde)},
                  {"l_cav", format_cell(cav.l_cav)},
                  {"alpha_loss", format_cell(cav.alpha_loss)},
                  {"t_ex", format_cell(cav.t_ex)},
                  {"gamma", format_cell(gam)},
                  {"tau", format_cell(r.tau)}},
                 {rec});

  std::printf("recommended T_ex = %.6g (actual/recommended = %.4g) -> %s\n",
              r.t_ex_recommended, r.cond1_ratio, r.cond1_pass ? "ok" : "adjust");
  std::printf("cavity length margin (alpha_loss/4gamma)/L = %.4g -> %s\n", r.cond2_margin,
              r.cond2_pass ? "ok" : "shorten cavity");
  if (std::isfinite(r.tau))
    std::printf("pulse width tau/tau_c = %.4g (tau_c = %.6g) -> %s\n", r.cond3_margin,
                r.tau_c, r.cond3_pass ? "ok" : "lengthen pulse");
  else
    std::printf("pulse width not supplied; tau_c = %.6g\n", r.tau_c);
  std::printf("rates: g=%.6g kappa_in=%.6g kappa_ex=%.6g (C_in=%.6g)\n", r.rates.g,
              r.rates.kappa_in, r.rates.kappa_ex, r.rates.c_in());
  return kExitOk;
}

// --------------------------------------------------------- optimize-kex ----

int cmd_optimize_kex(const Options& o) {
  const RunConfig cfg = o.merged();
  const double gam = o.resolved_gamma(cfg);
  if (!cfg.g || !cfg.kappa_in)
    throw UsageError("optimize-kex needs g and kappa_in (plus tau unless --adiabatic)");
  const double g = *cfg.g;
  const double kin = *cfg.kappa_in;
  const double c_in = g * g / (2.0 * kin * gam);

  Optimum opt;
  if (o.adiabatic) {
    opt = kex_opt_adiabatic(kin, c_in);
  } else {
    const double tau = o.taus(cfg).front();
    const double root = std::sqrt(2.0 * c_in + 1.0);
    const double lo = o.kex_min.value_or(kin * root * 1e-3);
    const double hi = o.kex_max.value_or(kin * root * 1e3);
    const int coarse = o.grid > 0 ? o.grid : 200;
    opt = kex_opt_numeric(g, gam, kin, PulseSpec(tau), {lo, hi}, coarse);
  }

  CsvBuilder csv({"method", "kappa_ex_opt" + o.rate_unit(), "ps_opt[-]",
                  "bracket_lo" + o.rate_unit(), "bracket_hi" + o.rate_unit(),
                  "iterations[-]", "boundary_hit[-]"});
  const double rs = o.gamma_units ? 1.0 / gam : 1.0;
  csv.add(opt.method == Optimum::Method::ClosedForm ? "closed_form" : "numeric");
  csv.add(opt.kappa_ex_opt * rs);
  csv.add(opt.ps_opt);
  csv.add(opt.bracket_lo * rs);
  csv.add(opt.bracket_hi * rs);
  csv.add(static_cast<double>(opt.refine_iterations));
  csv.add(opt.boundary_hit ? "1" : "0");
  csv.end_row();
  const auto rec = write_output(o.out_dir, "optimize_kex.csv", csv.body());
  write_manifest(o.out_dir, "optimize-kex",
                 {{"g", format_cell(g)},
                  {"gamma", format_cell(gam)},
                  {"kappa_in", format_cell(kin)},
                  {"c_in", format_cell(c_in)}},
                 {rec});
  std::printf("kappa_ex_opt=%.8g (kappa_ex/kappa_in=%.6g) ps_opt=%.9f%s\n", opt.kappa_ex_opt,
              opt.kappa_ex_opt / kin, opt.ps_opt, opt.boundary_hit ? " [boundary]" : "");
  return kExitOk;
}

std::string sweep_meta_json(const SweepResult& s, const std::string& name) {
  std::string j = "{\n  \"sweep\": \"" + name + "\",\n  \"fixed\": {";
  for (std::size_t i = 0; i < s.fixed.size(); ++i) {
    if (i) j += ", ";
    j += "\"" + s.fixed[i].first + "\": " + format_cell(s.fixed[i].second);
  }
  j += "},\n";
  auto axis = [](const AxisSpec& a) {
    return "{\"name\": \"" + a.name + "\", \"scale\": \"" +
           (a.log ? std::string("log") : std::string("linear")) + "\", \"min\": " +
           format_cell(a.min) + ", \"max\": " + format_cell(a.max) +
           ", \"count\": " + std::to_string(a.count) + "}";
  };
  j += "  \"axis1\": " + axis(s.axis1) + ",\n  \"axis2\": " + axis(s.axis2) + ",\n";
  j += "  \"overlays\": {";
  for (std::size_t k = 0; k < s.overlays.size(); ++k) {
    if (k) j += ", ";
    j += "\n    \"" + s.overlays[k].first + "\": [";
    const auto& arr = s.overlays[k].second;
    for (Eigen::Index i = 0; i < arr.rows(); ++i) {
      if (i) j += ", ";
      j += "[" + format_cell(arr(i, 0)) + ", " + format_cell(arr(i, 1)) + "]";
    }
    j += "]";
  }
  j += "\n  }\n}\n";
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-QED single-photon generation toolkit"};
  app.set_version_flag("--version", spgen::kVersion);
  app.require_subcommand(1);

  Options o;
  auto* psmax = app.add_subcommand("psmax", "success-probability bound vs pulse width");
  auto* dynamics = app.add_subcommand("dynamics", "population dynamics and drive field");
  auto* drive = app.add_subcommand("drive", "synthesize and export the control field");
  auto* verify = app.add_subcommand(
      "verify", "round-trip check: synthesize, integrate, compare recovered P_S");
  auto* sweep = app.add_subcommand("sweep", "2-D parameter sweeps (fig2, fig6, fig7, custom)");
  auto* design = app.add_subcommand("design", "physical-cavity design-condition report");
  auto* optkex = app.add_subcommand("optimize-kex", "optimal external coupling rate");
  for (auto* cmd : {psmax, dynamics, drive, verify, sweep, design, optkex})
    add_common(cmd, o);
  verify->add_option("--min-overlap", o.min_overlap, "required output-mode overlap");
  drive->add_option("--w0", o.w0_path, "CSV waveform (t,value) or (t,re,im)");
  sweep->add_option("--name", o.sweep_name, "named sweep: fig2, fig6, or fig7");
  sweep->add_option("--axis1", o.axis1_spec, "axis override name:min:max:count[:lin|log]");
  sweep->add_option("--axis2", o.axis2_spec, "axis override name:min:max:count[:lin|log]");
  sweep->add_option("--c-in", o.c_in, "internal cooperativity");
  sweep->add_option("--kappa-in-over-gamma", o.kappa_in_over_gamma,
                    "internal decay rate in gamma units");
  optkex->add_flag("--adiabatic", o.adiabatic, "closed-form long-pulse optimum");
  optkex->add_option("--kex-min", o.kex_min, "lower search bound");
  optkex->add_option("--kex-max", o.kex_max, "upper search bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (psmax->parsed()) return cmd_psmax(o);
    if (dynamics->parsed()) return cmd_dynamics(o);
    if (drive->parsed()) return cmd_drive(o);
    if (verify->parsed()) return cmd_verify(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (design->parsed()) return cmd_design(o);
    if (optkex->parsed()) return cmd_optimize_kex(o);
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const spgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kExitVerification;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
