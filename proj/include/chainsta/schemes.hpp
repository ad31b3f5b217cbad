// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lambda (3-level) and M (5-level) chain Hamiltonians, and their
// large-detuning reductions to effective 2- and 3-level models.

#include <chainsta/qcore.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace chainsta {

/// A real time-dependent control value (Rabi frequency or detuning, rad/us).
using Channel = std::function<double(double)>;

inline Channel constant_channel(double v) {
  return [v](double) { return v; };
}

/// Lambda chain |g1> - |e1> - |g2>.
struct LambdaParams {
  Channel omega1 = constant_channel(0.0);
  Channel omega2 = constant_channel(0.0);
  double delta_single = 0.0;
  Channel delta_two = constant_channel(0.0);
  double duration = 1.0; // window used by the regime diagnostics
};

/// M chain |g1> - |e1> - |g2> - |e2> - |g3>.
struct MParams {
  std::array<Channel, 4> omega{constant_channel(0.0), constant_channel(0.0), constant_channel(0.0),
                               constant_channel(0.0)};
  double delta_single = 0.0;
  double duration = 1.0;
  bool stark_balanced = false;
};

/// Effective two-level model H_e = 1/2 [[delta_e, omega_e], [omega_e, -delta_e]].
struct EffTwoLevel {
  Channel omega_e;
  Channel delta_e;
  double duration = 1.0;
  std::vector<std::string> warnings;

  HamiltonianRule<2> hamiltonian() const {
    return HamiltonianRule<2>([oe = omega_e, de = delta_e](double t) {
      const double o = oe(t);
      const double d = de(t);
      Matrix<2> h;
      h << 0.5 * d, 0.5 * o, 0.5 * o, -0.5 * d;
      return h;
    });
  }
};

/// Resonant effective three-level chain with off-diagonals omega_e1/2, omega_e2/2.
struct EffThreeLevel {
  Channel omega_e1;
  Channel omega_e2;
  double duration = 1.0;
  std::vector<std::string> warnings;

  HamiltonianRule<3> hamiltonian() const {
    return HamiltonianRule<3>([a = omega_e1, b = omega_e2](double t) {
      const double x = 0.5 * a(t);
      const double y = 0.5 * b(t);
      Matrix<3> h = Matrix<3>::Zero();
      h(0, 1) = h(1, 0) = x;
      h(1, 2) = h(2, 1) = y;
      return h;
    });
  }
};

// "Delta >> Omega": ratio below which the reductions emit a warning.
inline constexpr double kRegimeRatio = 10.0;
inline constexpr int kDiagnosticSamples = 401;
inline constexpr double kStarkBalanceTol = 1e-6;

inline HamiltonianRule<3> build_lambda(const LambdaParams& p) {
  return HamiltonianRule<3>([p](double t) {
    const double o1 = 0.5 * p.omega1(t);
    const double o2 = 0.5 * p.omega2(t);
    Matrix<3> h = Matrix<3>::Zero();
    h(0, 1) = h(1, 0) = o1;
    h(1, 2) = h(2, 1) = o2;
    h(1, 1) = p.delta_single;
    h(2, 2) = p.delta_two(t);
    return h;
  });
}

inline HamiltonianRule<5> build_m(const MParams& p) {
  return HamiltonianRule<5>([p](double t) {
    Matrix<5> h = Matrix<5>::Zero();
    for (int j = 0; j < 4; ++j) {
      const double o = 0.5 * p.omega[static_cast<std::size_t>(j)](t);
      h(j, j + 1) = h(j + 1, j) = o;
    }
    h(1, 1) = p.delta_single;
    h(3, 3) = p.delta_single;
    return h;
  });
}

namespace detail {

inline std::vector<double> diagnostic_times(double duration) {
  return TimeGrid(0.0, duration > 0.0 ? duration : 1.0, kDiagnosticSamples).samples();
}

inline std::string regime_warning(double ratio) {
  std::ostringstream os;
  os << "large-detuning regime violated: |Delta| / max coupling = " << ratio << " < " << kRegimeRatio;
  return os.str();
}

} // namespace detail

/// Adiabatic elimination of |e1> for equal pump and Stokes:
/// omega_e = -omega^2 / (2 Delta), delta_e = -delta.
inline EffTwoLevel reduce_lambda(const LambdaParams& p) {
  if (p.delta_single == 0.0) throw DomainError("reduce_lambda: Delta = 0, elimination undefined");
  double peak = 0.0;
  double worst_mismatch = 0.0;
  for (double t : detail::diagnostic_times(p.duration)) {
    const double a = p.omega1(t);
    const double b = p.omega2(t);
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    worst_mismatch = std::max(worst_mismatch, std::abs(a - b) / scale);
    peak = std::max({peak, std::abs(a), std::abs(p.delta_two(t))});
  }
  if (worst_mismatch > 1e-9) {
    std::ostringstream os;
    os << "reduce_lambda: requires omega1 == omega2 (max relative mismatch " << worst_mismatch << ")";
    throw DomainError(os.str());
  }
  EffTwoLevel e;
  e.duration = p.duration;
  const double delta = p.delta_single;
  e.omega_e = [o = p.omega1, delta](double t) {
    const double v = o(t);
    return -v * v / (2.0 * delta);
  };
  e.delta_e = [d = p.delta_two](double t) { return -d(t); };
  if (peak > 0.0 && std::abs(delta) < kRegimeRatio * peak) {
    e.warnings.push_back(detail::regime_warning(std::abs(delta) / peak));
  }
  return e;
}

/// Largest relative violation of omega1 = omega4 = sqrt(omega2^2 + omega3^2) over the window.
inline double stark_balance_violation(const MParams& p) {
  double worst = 0.0;
  for (double t : detail::diagnostic_times(p.duration)) {
    const double o2 = p.omega[1](t);
    const double o3 = p.omega[2](t);
    const double s = std::hypot(o2, o3);
    for (double edge : {p.omega[0](t), p.omega[3](t)}) {
      const double scale = std::max(std::abs(edge), s);
      if (scale > 0.0) worst = std::max(worst, std::abs(edge - s) / scale);
    }
  }
  return worst;
}

/// Reduction of the Stark-balanced M chain to the resonant effective Lambda of
/// the ground levels, in the frame that removes the common light shift.
inline EffThreeLevel reduce_m(const MParams& p) {
  if (p.delta_single == 0.0) throw DomainError("reduce_m: Delta = 0, elimination undefined");
  const double violation = stark_balance_violation(p);
  if (violation > kStarkBalanceTol) {
    std::ostringstream os;
    os << "reduce_m: Stark-balance constraint omega1 = omega4 = sqrt(omega2^2 + omega3^2) violated "
          "(max relative violation "
       << violation << ")";
    throw DomainError(os.str());
  }
  double peak = 0.0;
  for (double t : detail::diagnostic_times(p.duration)) {
    for (const auto& ch : p.omega) peak = std::max(peak, std::abs(ch(t)));
  }
  EffThreeLevel e;
  e.duration = p.duration;
  const double delta = p.delta_single;
  e.omega_e1 = [o2 = p.omega[1], o3 = p.omega[2], delta](double t) {
    const double a = o2(t);
    return -a * std::hypot(a, o3(t)) / (2.0 * delta);
  };
  e.omega_e2 = [o2 = p.omega[1], o3 = p.omega[2], delta](double t) {
    const double b = o3(t);
    return -b * std::hypot(o2(t), b) / (2.0 * delta);
  };
  if (peak > 0.0 && std::abs(delta) < kRegimeRatio * peak) {
    e.warnings.push_back(detail::regime_warning(std::abs(delta) / peak));
  }
  return e;
}

/// max_t 1/2 |omega_e' delta_e - delta_e' omega_e| / (omega_e^2 + delta_e^2)^(3/2)
/// with finite-difference derivatives inside the grid window. Small values mean adiabatic following.
inline double adiabaticity_margin(const EffTwoLevel& e, const TimeGrid& grid) {
  const double h = 1e-6 * grid.span();
  double worst = 0.0;
  for (double t : grid.samples()) {
    const double o = e.omega_e(t);
    const double d = e.delta_e(t);
    const double gap2 = o * o + d * d;
    if (gap2 == 0.0) {
      std::ostringstream os;
      os << "adiabaticity_margin: omega_e^2 + delta_e^2 = 0 at t = " << t;
      throw DomainError(os.str());
    }
    const double od = derivative_scalar(e.omega_e, t, grid.t_start(), grid.t_end(), h);
    const double dd = derivative_scalar(e.delta_e, t, grid.t_start(), grid.t_end(), h);
    worst = std::max(worst, 0.5 * std::abs(od * d - dd * o) / std::pow(gap2, 1.5));
  }
  return worst;
}

} // namespace chainsta
