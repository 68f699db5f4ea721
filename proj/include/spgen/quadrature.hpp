#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace spgen {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1].
inline constexpr double kGkNode[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
QuadResult gk15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kronrod = kKronrodW[7] * fc;
  double gauss = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNode[i];
    const double f1 = f(mid - dx);
    const double f2 = f(mid + dx);
    kronrod += kKronrodW[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kGaussW[i / 2] * (f1 + f2);
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half), 15};
}

}  // namespace detail

/// Adaptive bisection quadrature with an absolute-tolerance target.
template <typename F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-10,
                              int max_depth = 40) {
  if (a == b) return {0.0, 0.0, 0};
  if (a > b) {
    QuadResult r = integrate_adaptive(f, b, a, abs_tol, max_depth);
    r.value = -r.value;
    return r;
  }
  long evals = 0;
  const std::function<QuadResult(double, double, double, int)> recurse =
      [&](double lo, double hi, double tol, int depth) -> QuadResult {
    QuadResult r = detail::gk15(f, lo, hi);
    evals += r.evaluations;
    if (r.error <= tol || depth >= max_depth) return r;
    const double mid = 0.5 * (lo + hi);
    const QuadResult left = recurse(lo, mid, 0.5 * tol, depth + 1);
    const QuadResult right = recurse(mid, hi, 0.5 * tol, depth + 1);
    return {left.value + right.value, left.error + right.error, 0};
  };
  QuadResult r = recurse(a, b, abs_tol, 0);
  r.evaluations = evals;
  return r;
}

/// Cumulative integral of f along a grid: out[i] = integral from grid[0] to
/// grid[i], each panel integrated adaptively.
template <typename F>
Eigen::ArrayXd cumulative_integral(F&& f, const Eigen::ArrayXd& grid,
                                   double panel_abs_tol = 1e-12) {
  Eigen::ArrayXd out(grid.size());
  out[0] = 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    acc += integrate_adaptive(f, grid[i - 1], grid[i], panel_abs_tol, 8).value;
    out[i] = acc;
  }
  return out;
}

/// Composite Simpson over tabulated samples on a uniform grid (trailing
/// trapezoid panel when the panel count is odd).
template <typename Scalar>
Scalar integrate_samples(const Eigen::ArrayXd& grid,
                         const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y) {
  const Eigen::Index n = grid.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("integrate_samples: bad sizes");
  const double h = grid[1] - grid[0];
  Scalar acc = Scalar(0);
  Eigen::Index i = 0;
  for (; i + 2 < n; i += 2) acc += (y[i] + 4.0 * y[i + 1] + y[i + 2]) * (h / 3.0);
  if (i + 1 < n) acc += (y[i] + y[i + 1]) * (h / 2.0);
  return acc;
}

}  // namespace spgen
