#include <doctest.h>

#include <cmath>

#include "spgen/interpolate.hpp"
#include "spgen/quadrature.hpp"
#include "spgen/special.hpp"

using namespace spgen;

TEST_CASE("erf_plus_one matches erf and saturates") {
  CHECK(erf_plus_one(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(erf_plus_one(1.0) == doctest::Approx(std::erf(1.0) + 1.0).epsilon(1e-15));
  CHECK(erf_plus_one(-2.5) == doctest::Approx(std::erfc(2.5)).epsilon(1e-14));
  CHECK(erf_plus_one(9.5) == 2.0);
  CHECK(erf_plus_one(-9.5) == 0.0);
}

TEST_CASE("exp_weighted agrees with the direct product in the normal range") {
  for (double coeff : {1.0, -3.7, 1e-12, 4.2e5}) {
    for (double x2 : {0.0, 1.0, 25.0, 400.0}) {
      CHECK(exp_weighted(coeff, x2) ==
            doctest::Approx(coeff * std::exp(-x2)).epsilon(1e-13));
    }
  }
  CHECK(exp_weighted(0.0, 1.0) == 0.0);
}

TEST_CASE("exp_weighted survives extreme prefactors") {
  // 1e305 * exp(-100): the direct product would overflow on the way in
  const double v = exp_weighted(1e305, 100.0);
  CHECK(v == doctest::Approx(std::exp(std::log(1e305) - 100.0)).epsilon(1e-12));
  CHECK(std::isfinite(v));
  CHECK(exp_weighted(1e250, 800.0) ==
        doctest::Approx(std::exp(std::log(1e250) - 800.0)).epsilon(1e-10));
  CHECK(exp_weighted(1e10, 2000.0) == 0.0);
  CHECK(exp_weighted(-1e305, 100.0) == -v);
}

TEST_CASE("adaptive quadrature on known integrals") {
  const auto sq = [](double x) { return x * x; };
  CHECK(integrate_adaptive(sq, 0.0, 1.0, 1e-12).value ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  const auto gauss = [](double x) { return std::exp(-x * x); };
  CHECK(integrate_adaptive(gauss, -8.0, 8.0, 1e-12).value ==
        doctest::Approx(kSqrtPi).epsilon(1e-12));

  // orientation flip
  CHECK(integrate_adaptive(sq, 1.0, 0.0, 1e-12).value ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(integrate_adaptive(sq, 2.0, 2.0, 1e-12).value == 0.0);
}

TEST_CASE("cumulative integral matches endpoint quadrature") {
  const auto f = [](double x) { return std::sin(3.0 * x) + 0.5 * x; };
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(257, -2.0, 5.0);
  const Eigen::ArrayXd cum = cumulative_integral(f, grid, 1e-13);
  for (Eigen::Index i : {Eigen::Index(64), Eigen::Index(200), Eigen::Index(256)}) {
    const double ref = integrate_adaptive(f, grid[0], grid[i], 1e-13).value;
    CHECK(cum[i] == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("sample quadrature integrates smooth data") {
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(1001, 0.0, M_PI);
  Eigen::ArrayXd y = grid.sin();
  CHECK(integrate_samples<double>(grid, y) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fourth-order derivative of a cubic is exact") {
  const Eigen::Index n = 33;
  const double h = 0.25;
  Eigen::ArrayXd y(n), expect(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = h * static_cast<double>(i);
    y[i] = 2.0 * x * x * x - x * x + 3.0 * x - 5.0;
    expect[i] = 6.0 * x * x - 2.0 * x + 3.0;
  }
  const Eigen::ArrayXd d = fd_derivative<double>(y, h);
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK(d[i] == doctest::Approx(expect[i]).epsilon(1e-11));
}

TEST_CASE("cubic interpolant reproduces smooth functions") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(101, 0.0, 6.0);
  Eigen::ArrayXd y = (0.7 * x).sin();
  const RealInterpolant f(x, y);
  for (double t : {0.131, 1.87, 3.33, 5.9}) {
    CHECK(f(t) == doctest::Approx(std::sin(0.7 * t)).epsilon(1e-7));
    CHECK(f.derivative(t) == doctest::Approx(0.7 * std::cos(0.7 * t)).epsilon(1e-5));
  }
  CHECK(f(-1.0) == y[0]);    // clamped
  CHECK(f(100.0) == y[100]);
}
