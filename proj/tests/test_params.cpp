#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spgen/analytic.hpp"
#include "spgen/params.hpp"
#include "spgen/quadrature.hpp"
#include "test_util.hpp"

using namespace spgen;
using namespace spgen::testing;

TEST_CASE("physical cavity to rates") {
  const PhysicalCavity cav(5.0, 2.5e-4, 1e-3, 1e-3);
  const AtomCavityParams p = physical_to_rates(cav, 1.0);
  CHECK(p.g == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(p.kappa_in == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.kappa_ex == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.c_in() == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(std::abs(p.c_in() - cav.c_in()) < 1e-12 * cav.c_in());
}

TEST_CASE("doubling the cavity length") {
  const PhysicalCavity a(5.0, 2.5e-4, 1e-3, 1e-3);
  const PhysicalCavity b(5.0, 5.0e-4, 1e-3, 1e-3);
  const AtomCavityParams pa = physical_to_rates(a, 1.0);
  const AtomCavityParams pb = physical_to_rates(b, 1.0);
  CHECK(pb.kappa_in == doctest::Approx(pa.kappa_in / 2).epsilon(1e-12));
  CHECK(pb.kappa_ex == doctest::Approx(pa.kappa_ex / 2).epsilon(1e-12));
  CHECK(pb.g == doctest::Approx(pa.g / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("matched transmittance and loss split the decay evenly") {
  const PhysicalCavity cav(5.0, 2.5e-4, 1e-3, 1e-3);
  const AtomCavityParams p = physical_to_rates(cav, 1.0);
  CHECK(p.kappa_ex == doctest::Approx(p.kappa_in).epsilon(1e-12));
  CHECK(p.eta_esc() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("resolving rates from the figure ratios") {
  SUBCASE("purcell point") {
    const AtomCavityParams p = resolve_from_ratios(0.1, 10.0, 0.95, 1.0);
    CHECK(p.g == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(p.kappa() == doctest::Approx(2000.0).epsilon(1e-12));
    CHECK(p.kappa_ex == doctest::Approx(1900.0).epsilon(1e-12));
    CHECK(p.kappa_in == doctest::Approx(100.0).epsilon(1e-12));
  }
  SUBCASE("strong point") {
    const AtomCavityParams p = resolve_from_ratios(10.0, 10.0, 0.95, 1.0);
    CHECK(p.g == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.kappa() == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("lossless cavity") {
    const AtomCavityParams p = resolve_from_ratios(1.0, 10.0, 1.0, 1.0);
    CHECK(p.kappa_in == 0.0);
    CHECK(p.kappa_ex == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(p.g == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::isinf(p.c_in()));
    CHECK(!p.has_finite_c_in());
  }
}

TEST_CASE("ratio resolution round-trips") {
  std::mt19937 rng(42);
  for (int i = 0; i < 200; ++i) {
    const double r = log_uniform(rng, 1e-3, 1e3);
    const double c = log_uniform(rng, 1e-2, 1e3);
    const double eta = uniform(rng, 1e-3, 1.0);
    const double gamma = log_uniform(rng, 1e-2, 1e2);
    const AtomCavityParams p = resolve_from_ratios(r, c, eta, gamma);
    CHECK(std::abs(p.g / p.kappa() - r) < 1e-12 * r);
    CHECK(std::abs(p.cooperativity() - c) < 1e-12 * c);
    CHECK(std::abs(p.eta_esc() - eta) < 1e-12 * eta);
    CHECK(p.gamma == gamma);
  }
}

TEST_CASE("regime classification at the figure points") {
  CHECK(classify_regime(AtomCavityParams(2.0, 1.0, 0.01, 0.19)) == Regime::Strong);
  CHECK(classify_regime(AtomCavityParams(200.0, 1.0, 100.0, 1900.0)) == Regime::Purcell);
  CHECK(classify_regime(AtomCavityParams(0.2, 1.0, 1e-4, 19e-4)) == Regime::WeakHighC);
  // g = kappa point sits on the boundary
  CHECK(classify_regime(AtomCavityParams(20.0, 1.0, 1.0, 19.0)) == Regime::Intermediate);
}

TEST_CASE("regime ties go to intermediate") {
  // g barely above kappa: inside the 1e-6 relative tie band
  CHECK(classify_regime(AtomCavityParams(1.0 + 1e-9, 0.5, 0.5, 0.5)) ==
        Regime::Intermediate);
  // clearly above the band
  CHECK(classify_regime(AtomCavityParams(1.01, 0.5, 0.25, 0.25)) == Regime::Strong);
}

TEST_CASE("regime classification is scale invariant") {
  std::mt19937 rng(7);
  const AtomCavityParams pts[] = {
      AtomCavityParams(2.0, 1.0, 0.01, 0.19),
      AtomCavityParams(200.0, 1.0, 100.0, 1900.0),
      AtomCavityParams(0.2, 1.0, 1e-4, 19e-4),
      AtomCavityParams(20.0, 1.0, 1.0, 19.0),
  };
  for (const auto& p : pts) {
    const Regime base = classify_regime(p);
    for (int i = 0; i < 50; ++i) {
      const double lam = log_uniform(rng, 1e-6, 1e6);
      const AtomCavityParams q(p.g * lam, p.gamma * lam, p.kappa_in * lam,
                               p.kappa_ex * lam);
      CHECK(classify_regime(q) == base);
    }
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(AtomCavityParams(-1.0, 1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(AtomCavityParams(1.0, 0.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(AtomCavityParams(1.0, 1.0, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(AtomCavityParams(1.0, 1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(PulseSpec(0.0), std::domain_error);
  CHECK_THROWS_AS(PulseSpec(1.0, 3.9), std::domain_error);
  CHECK_THROWS_AS(PhysicalCavity(0.0, 1.0, 0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(PhysicalCavity(1.0, 1.0, 1.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(PhysicalCavity(1.0, 1.0, 0.5, 1.5), std::domain_error);
  CHECK_THROWS_AS(resolve_from_ratios(1.0, 1.0, 1.2, 1.0), std::domain_error);
  CHECK_THROWS_AS(resolve_from_ratios(1.0, -1.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(physical_to_rates(PhysicalCavity(1.0, 1.0, 0.5, 0.5), 0.0),
                  std::domain_error);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Detunings(nan, 0.0), std::domain_error);
}

TEST_CASE("pulse window captures the waveform norm") {
  // quadrature oracle for the truncated intensity integral
  for (double n_widths : {4.5, 6.0, 8.0}) {
    for (double tau : {0.3, 1.0, 40.0}) {
      const PulseSpec pulse(tau, n_widths);
      const auto intensity = [&](double t) {
        const double w = waveform_w0(t, pulse);
        return w * w;
      };
      const double norm = integrate_adaptive(intensity, pulse.window_start(),
                                             pulse.window_end(), 1e-13)
                              .value;
      CHECK(std::abs(norm - 1.0) < 1e-9);
    }
  }
}
