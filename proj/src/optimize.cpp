#include "spgen/optimize.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "spgen/analytic.hpp"

namespace spgen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGoldenRatio = 0.61803398874989484820;

// Work-stealing loop over cell indices; each cell writes disjoint slots so
// the output is deterministic regardless of scheduling.
void parallel_cells(int n_cells, const std::function<void(int)>& work, int threads) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_cells));
  if (threads == 1) {
    for (int i = 0; i < n_cells; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) work(i);
    });
  for (auto& th : pool) th.join();
}

double ps_max_at_kex(double g, double gamma, double kappa_in, double kappa_ex,
                     const PulseSpec& pulse) {
  return ps_max(AtomCavityParams(g, gamma, kappa_in, kappa_ex), pulse);
}

}  // namespace

Eigen::ArrayXd AxisSpec::values() const {
  validate();
  if (log) {
    const double l0 = std::log(min), l1 = std::log(max);
    return Eigen::ArrayXd::LinSpaced(count, l0, l1).exp();
  }
  return Eigen::ArrayXd::LinSpaced(count, min, max);
}

void AxisSpec::validate() const {
  if (count < 2) throw std::domain_error("AxisSpec: count must be >= 2");
  if (!(max > min)) throw std::domain_error("AxisSpec: max must exceed min");
  if (log && !(min > 0.0)) throw std::domain_error("AxisSpec: log axis needs positive bounds");
}

Optimum kex_opt_adiabatic(double kappa_in, double c_in) {
  if (!(kappa_in > 0.0))
    throw std::domain_error("kex_opt_adiabatic: kappa_in must be > 0 (finite C_in)");
  if (!(c_in > 0.0)) throw std::domain_error("kex_opt_adiabatic: c_in must be > 0");
  const double root = std::sqrt(2.0 * c_in + 1.0);
  Optimum o;
  o.method = Optimum::Method::ClosedForm;
  o.kappa_ex_opt = kappa_in * root;
  o.ps_opt = 1.0 - 2.0 / (1.0 + root);
  o.bracket_lo = o.bracket_hi = o.kappa_ex_opt;
  return o;
}

Optimum kex_opt_numeric(double g, double gamma, double kappa_in, const PulseSpec& pulse,
                        std::pair<double, double> bounds, int coarse_points) {
  auto [lo, hi] = bounds;
  if (!(lo > 0.0) || !(hi > lo))
    throw std::domain_error("kex_opt_numeric: bounds must satisfy 0 < lo < hi");
  if (coarse_points < 3) coarse_points = 3;

  const auto value = [&](double kex) { return ps_max_at_kex(g, gamma, kappa_in, kex, pulse); };

  const Eigen::ArrayXd grid =
      Eigen::ArrayXd::LinSpaced(coarse_points, std::log(lo), std::log(hi)).exp();
  Eigen::Index best = 0;
  double best_val = -1.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double v = value(grid[i]);
    if (v > best_val) { best_val = v; best = i; }
  }

  Optimum o;
  o.method = Optimum::Method::Numeric;
  o.bracket_lo = lo;
  o.bracket_hi = hi;
  if (best == 0 || best == grid.size() - 1) {
    o.boundary_hit = true;
    o.kappa_ex_opt = grid[best];
    o.ps_opt = best_val;
    return o;
  }

  // golden-section in log space inside the coarse bracket
  double a = std::log(grid[best - 1]), b = std::log(grid[best + 1]);
  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = value(std::exp(x1));
  double f2 = value(std::exp(x2));
  int iter = 0;
  while (b - a > 1e-6 && iter < 200) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = value(std::exp(x2));
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = value(std::exp(x1));
    }
    ++iter;
  }
  const double kex = std::exp(0.5 * (a + b));
  o.kappa_ex_opt = kex;
  o.ps_opt = value(kex);
  o.refine_iterations = iter;
  if (o.ps_opt < best_val) { o.kappa_ex_opt = grid[best]; o.ps_opt = best_val; }
  return o;
}

SweepResult sweep_fig2(double c, double eta_esc, const AxisSpec& gamma_tau,
                       const AxisSpec& g_over_kappa, int threads) {
  if (!(c > 0.0)) throw std::domain_error("sweep_fig2: C must be > 0");
  if (!(eta_esc > 0.0 && eta_esc <= 1.0))
    throw std::domain_error("sweep_fig2: eta_esc must be in (0, 1]");
  const Eigen::ArrayXd taus = gamma_tau.values();   // gamma = 1 units
  const Eigen::ArrayXd ratios = g_over_kappa.values();

  SweepResult out;
  out.axis1 = gamma_tau;
  out.axis2 = g_over_kappa;
  out.fixed = {{"c", c}, {"eta_esc", eta_esc}, {"gamma", 1.0}};
  out.ps.resize(taus.size(), ratios.size());
  out.kex_opt = Eigen::ArrayXXd::Constant(taus.size(), ratios.size(), kNaN);
  out.regime.resize(taus.size(), ratios.size());

  const int n1 = static_cast<int>(taus.size());
  const int n2 = static_cast<int>(ratios.size());
  parallel_cells(n1 * n2, [&](int cell) {
    const int i = cell / n2, j = cell % n2;
    const AtomCavityParams p = resolve_from_ratios(ratios[j], c, eta_esc, 1.0);
    out.ps(i, j) = ps_max(p, PulseSpec(taus[i]));
    out.regime(i, j) = static_cast<int>(classify_regime(p));
  }, threads);

  Eigen::ArrayX2d inv_kappa(ratios.size(), 2), kappa_g2(ratios.size(), 2);
  for (Eigen::Index j = 0; j < ratios.size(); ++j) {
    const AtomCavityParams p = resolve_from_ratios(ratios[j], c, eta_esc, 1.0);
    inv_kappa(j, 0) = 1.0 / p.kappa();
    inv_kappa(j, 1) = ratios[j];
    kappa_g2(j, 0) = p.kappa() / (p.g * p.g);
    kappa_g2(j, 1) = ratios[j];
  }
  out.overlays.emplace_back("tau_eq_inv_kappa", inv_kappa);
  out.overlays.emplace_back("tau_eq_kappa_over_g2", kappa_g2);
  return out;
}

SweepResult sweep_fig6(double c_in, double kappa_in_over_gamma, const AxisSpec& tau,
                       const AxisSpec& kex_over_kin, int threads) {
  if (!(c_in > 0.0)) throw std::domain_error("sweep_fig6: c_in must be > 0");
  if (!(kappa_in_over_gamma > 0.0))
    throw std::domain_error("sweep_fig6: kappa_in/gamma must be > 0");
  const double gamma = 1.0;
  const double kappa_in = kappa_in_over_gamma * gamma;
  const double g = std::sqrt(2.0 * c_in * kappa_in * gamma);
  const Eigen::ArrayXd taus = tau.values();
  const Eigen::ArrayXd ratios = kex_over_kin.values();

  SweepResult out;
  out.axis1 = tau;
  out.axis2 = kex_over_kin;
  out.fixed = {{"c_in", c_in}, {"kappa_in_over_gamma", kappa_in_over_gamma},
               {"g", g}, {"gamma", gamma}};
  out.ps.resize(taus.size(), ratios.size());
  out.kex_opt = Eigen::ArrayXXd::Constant(taus.size(), ratios.size(), kNaN);
  out.regime = Eigen::ArrayXXi::Constant(taus.size(), ratios.size(), -1);

  const int n1 = static_cast<int>(taus.size());
  const int n2 = static_cast<int>(ratios.size());
  parallel_cells(n1 * n2, [&](int cell) {
    const int i = cell / n2, j = cell % n2;
    const AtomCavityParams p(g, gamma, kappa_in, ratios[j] * kappa_in);
    out.ps(i, j) = ps_max(p, PulseSpec(taus[i]));
    out.regime(i, j) = static_cast<int>(classify_regime(p));
  }, threads);

  // per-tau ridge: argmax over the external-rate axis
  Eigen::ArrayX2d ridge(taus.size(), 2);
  for (Eigen::Index i = 0; i < taus.size(); ++i) {
    Eigen::Index jbest = 0;
    for (Eigen::Index j = 1; j < ratios.size(); ++j)
      if (out.ps(i, j) > out.ps(i, jbest)) jbest = j;
    ridge(i, 0) = taus[i];
    ridge(i, 1) = ratios[jbest];
  }
  out.overlays.emplace_back("ridge_kex_over_kin", ridge);

  Eigen::ArrayX2d ref(taus.size(), 2);
  ref.col(0) = taus;
  ref.col(1).setConstant(std::sqrt(2.0 * c_in + 1.0));
  out.overlays.emplace_back("kex_ub_opt_over_kin", ref);
  return out;
}

SweepResult sweep_fig7(double c_in, double a_eff_tilde, double alpha_loss, double gamma,
                       const AxisSpec& tau, const AxisSpec& l_cav, int threads) {
  if (!(c_in > 0.0)) throw std::domain_error("sweep_fig7: c_in must be > 0");
  if (std::abs(a_eff_tilde * alpha_loss * c_in - 1.0) > 1e-9)
    throw std::domain_error(
        "sweep_fig7: a_eff_tilde * alpha_loss must equal 1/c_in");
  const Eigen::ArrayXd taus = tau.values();
  const Eigen::ArrayXd lengths = l_cav.values();

  SweepResult out;
  out.axis1 = tau;
  out.axis2 = l_cav;
  out.fixed = {{"c_in", c_in}, {"a_eff_tilde", a_eff_tilde},
               {"alpha_loss", alpha_loss}, {"gamma", gamma}};
  out.ps.resize(taus.size(), lengths.size());
  out.kex_opt.resize(taus.size(), lengths.size());
  out.regime = Eigen::ArrayXXi::Constant(taus.size(), lengths.size(), -1);

  const double root = std::sqrt(2.0 * c_in + 1.0);
  const int n1 = static_cast<int>(taus.size());
  const int n2 = static_cast<int>(lengths.size());
  parallel_cells(n1 * n2, [&](int cell) {
    const int i = cell / n2, j = cell % n2;
    const double kappa_in = alpha_loss / (4.0 * lengths[j]);
    const double g = std::sqrt(gamma / (2.0 * a_eff_tilde * lengths[j]));
    const std::pair<double, double> bounds{kappa_in * root * 1e-3, kappa_in * root * 1e3};
    const Optimum o = kex_opt_numeric(g, gamma, kappa_in, PulseSpec(taus[i]), bounds, 120);
    out.ps(i, j) = o.ps_opt;
    out.kex_opt(i, j) = o.kappa_ex_opt;
    out.regime(i, j) = static_cast<int>(
        classify_regime(AtomCavityParams(g, gamma, kappa_in, o.kappa_ex_opt)));
  }, threads);

  // reference pulse-width curves against cavity length
  Eigen::ArrayX2d inv_kub(lengths.size(), 2), kub_g2(lengths.size(), 2), inv_g(lengths.size(), 2);
  for (Eigen::Index j = 0; j < lengths.size(); ++j) {
    const double kappa_in = alpha_loss / (4.0 * lengths[j]);
    const double g = std::sqrt(gamma / (2.0 * a_eff_tilde * lengths[j]));
    const double kappa_ub = kappa_in * (1.0 + root);
    inv_kub(j, 0) = 1.0 / kappa_ub;
    inv_kub(j, 1) = lengths[j];
    kub_g2(j, 0) = kappa_ub / (g * g);
    kub_g2(j, 1) = lengths[j];
    inv_g(j, 0) = 1.0 / g;
    inv_g(j, 1) = lengths[j];
  }
  out.overlays.emplace_back("tau_eq_inv_kappa_ub_opt", inv_kub);
  out.overlays.emplace_back("tau_eq_kappa_ub_opt_over_g2", kub_g2);
  out.overlays.emplace_back("tau_eq_inv_g", inv_g);
  return out;
}

DesignReport design_conditions(const PhysicalCavity& cav, double gamma, double tau) {
  const AtomCavityParams rates = physical_to_rates(cav, gamma);
  DesignReport r{
      .t_ex_recommended = std::sqrt(2.0 * cav.alpha_loss / cav.a_eff_tilde),
      .cond1_ratio = 0.0,
      .cond1_pass = false,
      .cond2_margin = 0.0,
      .cond2_pass = false,
      .tau_c = tau_critical(rates),
      .tau = tau,
      .cond3_margin = kNaN,
      .cond3_pass = false,
      .rates = rates,
  };
  r.cond1_ratio = cav.t_ex / r.t_ex_recommended;
  r.cond1_pass = r.cond1_ratio >= 0.5 && r.cond1_ratio <= 2.0;
  r.cond2_margin = (cav.alpha_loss / (4.0 * gamma)) / cav.l_cav;
  r.cond2_pass = r.cond2_margin >= 1.0;
  if (std::isfinite(tau)) {
    r.cond3_margin = tau / r.tau_c;
    r.cond3_pass = r.cond3_margin > 1.0;
  }
  return r;
}

}  // namespace spgen
