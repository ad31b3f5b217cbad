// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the 4th-order continuous
// extension (Hairer, Norsett & Wanner, "Solving ODEs I", routine DOPRI5).
// Works on any fixed-size Eigen matrix or vector of complex entries.

#include <chainsta/error.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace chainsta {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  long max_steps = 50'000'000;
  double initial_step = 0.0; // 0 selects automatically
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace detail::dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace detail::dp

/// Integrates dy/dt = f(t, y) from t0 and returns y at each of sample_times
/// (non-decreasing, all >= t0). The last sample time is the end point and is
/// hit exactly; interior samples use dense output.
///
/// on_step, when set, is called after every accepted step with (t, y).
template <class Y, class F>
std::vector<Y> integrate_dopri5(F&& f, double t0, const Y& y0, const std::vector<double>& sample_times,
                                const IntegratorOptions& opt, IntegratorStats* stats = nullptr,
                                const std::function<void(double, const Y&)>& on_step = {}) {
  using namespace detail::dp;
  std::vector<Y> out;
  if (sample_times.empty()) return out;
  out.reserve(sample_times.size());

  const double t_end = sample_times.back();
  if (t_end < t0 || sample_times.front() < t0) {
    throw DomainError("integrate_dopri5: sample times precede the initial time");
  }
  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;

  auto err_norm = [&](const Y& err, const Y& ya, const Y& yb) {
    double acc = 0.0;
    const auto n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk = opt.atol + opt.rtol * std::max(std::abs(ya.data()[i]), std::abs(yb.data()[i]));
      const double r = std::abs(err.data()[i]) / sk;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n));
  };

  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] == t0) {
    out.push_back(y0);
    ++next;
  }
  if (next == sample_times.size()) return out;

  double t = t0;
  Y y = y0;
  Y k1 = f(t, y);
  ++st.rhs_evals;

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    Y scale = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      scale.data()[i] = opt.atol + opt.rtol * std::abs(y.data()[i]);
    }
    auto wnorm = [&](const Y& v) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double r = std::abs(v.data()[i]) / scale.data()[i].real();
        acc += r * r;
      }
      return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double dnf = wnorm(k1);
    const double dny = wnorm(y);
    double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h0 = std::min(h0, t_end - t0);
    const Y y1 = (y + h0 * k1).eval();
    const Y f1 = f(t + h0, y1);
    ++st.rhs_evals;
    const double der2 = wnorm((f1 - k1).eval()) / h0;
    const double der = std::max(std::abs(der2), dnf);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der, 0.2);
    h = std::min({100.0 * h0, h1, t_end - t0});
  }

  const double safety = 0.9;
  const double fac_min = 0.2;
  const double fac_max = 10.0;
  bool last_rejected = false;

  while (t < t_end) {
    if (st.accepted + st.rejected >= opt.max_steps) {
      std::ostringstream os;
      os << "integrate_dopri5: exceeded " << opt.max_steps << " steps at t = " << t;
      throw NumericalError(os.str());
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "integrate_dopri5: step-size underflow (h = " << h << ") at t = " << t
         << "; input is stiff or singular";
      throw NumericalError(os.str());
    }
    bool final_step = false;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    const Y k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
    const Y k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const Y k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const Y k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const double t_new = final_step ? t_end : t + h;
    const Y k6 = f(t_new, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const Y y_new = (y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6)).eval();
    const Y k7 = f(t_new, y_new);
    st.rhs_evals += 6;

    const Y err = (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();
    const double en = err_norm(err, y, y_new);
    if (!std::isfinite(en)) {
      std::ostringstream os;
      os << "integrate_dopri5: non-finite error estimate at t = " << t;
      throw NumericalError(os.str());
    }

    if (en <= 1.0) {
      // Dense output for any samples in (t, t_new].
      if (next < sample_times.size() && sample_times[next] <= t_new) {
        const Y r2 = (y_new - y).eval();
        const Y r3 = (h * k1 - r2).eval();
        const Y r4 = (r2 - h * k7 - r3).eval();
        const Y r5 = (h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)).eval();
        while (next < sample_times.size() && sample_times[next] <= t_new) {
          const double ts = sample_times[next];
          if (ts == t_new) {
            out.push_back(y_new);
          } else {
            const double th = (ts - t) / h;
            const double th1 = 1.0 - th;
            out.push_back((y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))).eval());
          }
          ++next;
        }
      }
      t = t_new;
      y = y_new;
      k1 = k7;
      ++st.accepted;
      if (on_step) on_step(t, y);
      double fac = en == 0.0 ? fac_max : safety * std::pow(en, -0.2);
      fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
      last_rejected = false;
      h *= fac;
    } else {
      ++st.rejected;
      last_rejected = true;
      h *= std::max(fac_min, safety * std::pow(en, -0.2));
    }
  }
  while (next < sample_times.size()) {
    out.push_back(y);
    ++next;
  }
  return out;
}

} // namespace chainsta
