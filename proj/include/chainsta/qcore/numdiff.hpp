// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace chainsta {

/// Second-order finite-difference derivative of f at t, staying inside [lo, hi]
/// (central in the interior, three-point one-sided near the ends).
template <class F>
auto derivative(const F& f, double t, double lo, double hi, double h) {
  if (t - h < lo) {
    const auto f0 = f(t);
    return ((4.0 * (f(t + h) - f0) - (f(t + 2.0 * h) - f0)) / (2.0 * h)).eval();
  }
  if (t + h > hi) {
    const auto f0 = f(t);
    return ((4.0 * (f0 - f(t - h)) - (f0 - f(t - 2.0 * h))) / (2.0 * h)).eval();
  }
  return ((f(t + h) - f(t - h)) / (2.0 * h)).eval();
}

/// Scalar overload.
template <class F>
double derivative_scalar(const F& f, double t, double lo, double hi, double h) {
  if (t - h < lo) {
    const double f0 = f(t);
    return (4.0 * (f(t + h) - f0) - (f(t + 2.0 * h) - f0)) / (2.0 * h);
  }
  if (t + h > hi) {
    const double f0 = f(t);
    return (4.0 * (f0 - f(t - h)) - (f0 - f(t - 2.0 * h))) / (2.0 * h);
  }
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

} // namespace chainsta
