#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace spgen {

/// Fourth-order finite-difference derivative on a uniform grid, one-sided
/// stencils at the edges. Used for sampled waveforms where no analytic
/// derivative exists.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> fd_derivative(
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& y, double h) {
  const Eigen::Index n = y.size();
  if (n < 5) throw std::invalid_argument("fd_derivative: need at least 5 samples");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> d(n);
  const double s = 1.0 / (12.0 * h);
  d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s;
  d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s;
  for (Eigen::Index i = 2; i < n - 2; ++i)
    d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) * s;
  d[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * s;
  d[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) * s;
  return d;
}

/// Piecewise-cubic Hermite interpolant. Slopes come from fourth-order finite
/// differences on uniform grids, three-point differences otherwise. Evaluation
/// clamps to the end values outside the grid.
template <typename Scalar>
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(Eigen::ArrayXd x, Eigen::Array<Scalar, Eigen::Dynamic, 1> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const Eigen::Index n = x_.size();
    if (n != y_.size() || n < 2) throw std::invalid_argument("CubicInterpolant: bad sizes");
    h0_ = x_[1] - x_[0];
    uniform_ = true;
    for (Eigen::Index i = 1; i + 1 < n; ++i)
      if (std::abs((x_[i + 1] - x_[i]) - h0_) > 1e-9 * std::abs(h0_)) { uniform_ = false; break; }
    m_.resize(n);
    if (uniform_ && n >= 5) {
      m_ = fd_derivative<Scalar>(y_, h0_);
    } else {
      m_[0] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        m_[i] = (hl * hl * (y_[i + 1] - y_[i]) + hr * hr * (y_[i] - y_[i - 1])) /
                (hl * hr * (hl + hr));
      }
      m_[n - 1] = (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
    }
  }

  Scalar operator()(double t) const {
    const Eigen::Index n = x_.size();
    if (t <= x_[0]) return y_[0];
    if (t >= x_[n - 1]) return y_[n - 1];
    const Eigen::Index i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y_[i] + (u3 - 2 * u2 + u) * h * m_[i] +
           (-2 * u3 + 3 * u2) * y_[i + 1] + (u3 - u2) * h * m_[i + 1];
  }

  Scalar derivative(double t) const {
    const Eigen::Index n = x_.size();
    t = std::clamp(t, x_[0], x_[n - 1]);
    const Eigen::Index i = locate(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y_[i] + (3 * u2 - 4 * u + 1) * h * m_[i] +
            (-6 * u2 + 6 * u) * y_[i + 1] + (3 * u2 - 2 * u) * h * m_[i + 1]) / h;
  }

  const Eigen::ArrayXd& nodes() const { return x_; }

 private:
  Eigen::Index locate(double t) const {
    const Eigen::Index n = x_.size();
    if (uniform_) {
      auto i = static_cast<Eigen::Index>((t - x_[0]) / h0_);
      return std::clamp<Eigen::Index>(i, 0, n - 2);
    }
    auto it = std::upper_bound(x_.data(), x_.data() + n, t);
    return std::clamp<Eigen::Index>(it - x_.data() - 1, 0, n - 2);
  }

  Eigen::ArrayXd x_;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> y_;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> m_;
  double h0_ = 1.0;
  bool uniform_ = true;
};

using RealInterpolant = CubicInterpolant<double>;
using ComplexInterpolant = CubicInterpolant<std::complex<double>>;

}  // namespace spgen
