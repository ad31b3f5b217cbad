// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lewis-Riesenfeld invariants for the effective two- and three-level models,
// their eigenstates (the transport targets) and consistency diagnostics.

#include <chainsta/qcore.hpp>
#include <chainsta/schemes.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace chainsta {

inline constexpr double kPi = std::numbers::pi;

/// Auxiliary angles (theta, beta) of the two-level invariant.
struct TwoLevelAux {
  Channel theta;
  Channel beta;
  double omega0 = 1.0; // inert energy scale
};

enum class Direction { creation, detection };

inline const char* to_string(Direction d) { return d == Direction::creation ? "creation" : "detection"; }

/// Polynomial auxiliary angles chi(t) = sum a_j t^j (quartic) and
/// vartheta(t) = sum b_j t^j (cubic) of the three-level invariant.
struct ThreeLevelAux {
  std::array<double, 5> poly_a{};
  std::array<double, 4> poly_b{};
  double epsilon = 0.0;
  double t_f = 1.0;
  double omega0 = 1.0;
  Direction direction = Direction::creation;

  double chi(double t) const {
    return poly_a[0] + t * (poly_a[1] + t * (poly_a[2] + t * (poly_a[3] + t * poly_a[4])));
  }
  double chi_dot(double t) const {
    return poly_a[1] + t * (2.0 * poly_a[2] + t * (3.0 * poly_a[3] + t * 4.0 * poly_a[4]));
  }
  double vartheta(double t) const { return poly_b[0] + t * (poly_b[1] + t * (poly_b[2] + t * poly_b[3])); }
  double vartheta_dot(double t) const { return poly_b[1] + t * (2.0 * poly_b[2] + t * 3.0 * poly_b[3]); }
};

inline Matrix<2> invariant2(const TwoLevelAux& aux, double t) {
  const double th = aux.theta(t);
  const double b = aux.beta(t);
  const cplx off = std::sin(th) * std::polar(1.0, -b);
  Matrix<2> m;
  m << std::cos(th), off, std::conj(off), -std::cos(th);
  return 0.5 * aux.omega0 * m;
}

struct TwoLevelEigenstates {
  StateVector<2> phi_plus;
  StateVector<2> phi_minus;
};

inline TwoLevelEigenstates eigenstates2(const TwoLevelAux& aux, double t) {
  const double th = aux.theta(t);
  const double b = aux.beta(t);
  Vector<2> p;
  p << std::cos(0.5 * th) * std::polar(1.0, -b), std::sin(0.5 * th);
  Vector<2> m;
  m << std::sin(0.5 * th), -std::cos(0.5 * th) * std::polar(1.0, b);
  return {StateVector<2>(p), StateVector<2>(m)};
}

inline Matrix<3> invariant3(const ThreeLevelAux& aux, double t) {
  const double c = aux.chi(t);
  const double v = aux.vartheta(t);
  const cplx i(0.0, 1.0);
  Matrix<3> m;
  m << 0.0, std::cos(c) * std::sin(v), -i * std::sin(c),
      std::cos(c) * std::sin(v), 0.0, std::cos(c) * std::cos(v),
      i * std::sin(c), std::cos(c) * std::cos(v), 0.0;
  return 0.5 * aux.omega0 * m;
}

struct ThreeLevelEigenstates {
  StateVector<3> phi0;
  StateVector<3> phi_plus;
  StateVector<3> phi_minus;
};

inline ThreeLevelEigenstates eigenstates3(const ThreeLevelAux& aux, double t) {
  const double c = aux.chi(t);
  const double v = aux.vartheta(t);
  const cplx i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  Vector<3> z;
  z << std::cos(c) * std::cos(v), -i * std::sin(c), -std::cos(c) * std::sin(v);
  Vector<3> p;
  p << r * (std::sin(c) * std::cos(v) + i * std::sin(v)), r * i * std::cos(c),
      r * (-std::sin(c) * std::sin(v) + i * std::cos(v));
  Vector<3> m;
  m << r * (std::sin(c) * std::cos(v) - i * std::sin(v)), r * i * std::cos(c),
      r * (-std::sin(c) * std::sin(v) - i * std::cos(v));
  return {StateVector<3>(z), StateVector<3>(p), StateVector<3>(m)};
}

inline constexpr double kMinEpsilon = 1e-3;

/// Solves the boundary-value conditions for the polynomial ansatz:
///   chi(0) = chi(t_f) = epsilon, chi(t_f/2) = pi/4, chi'(0) = chi'(t_f) = 0,
///   vartheta(0), vartheta(t_f) = (0, pi/2) for creation or (pi/2, 0) for detection,
///   vartheta'(0) = vartheta'(t_f) = 0.
inline ThreeLevelAux solve_aux_polynomials(double t_f, double epsilon, Direction direction) {
  if (!(t_f > 0.0) || !std::isfinite(t_f)) throw DomainError("solve_aux_polynomials: t_f must be > 0");
  if (!(epsilon >= kMinEpsilon && epsilon < kPi / 4)) {
    std::ostringstream os;
    os << "solve_aux_polynomials: epsilon = " << epsilon << " outside [" << kMinEpsilon << ", pi/4)";
    throw DomainError(os.str());
  }
  auto value_row = [](double t, int n) {
    Eigen::RowVectorXd r(n);
    double p = 1.0;
    for (int j = 0; j < n; ++j, p *= t) r(j) = p;
    return r;
  };
  auto slope_row = [](double t, int n) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    double p = 1.0;
    for (int j = 1; j < n; ++j, p *= t) r(j) = static_cast<double>(j) * p;
    return r;
  };
  auto solve = [](const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - m * x); // one step of iterative refinement
    return x;
  };

  Eigen::MatrixXd ma(5, 5);
  ma << value_row(0.0, 5), value_row(t_f, 5), value_row(0.5 * t_f, 5), slope_row(0.0, 5),
      slope_row(t_f, 5);
  Eigen::VectorXd ra(5);
  ra << epsilon, epsilon, kPi / 4, 0.0, 0.0;
  const Eigen::VectorXd a = solve(ma, ra);

  const double v0 = direction == Direction::creation ? 0.0 : kPi / 2;
  const double v1 = direction == Direction::creation ? kPi / 2 : 0.0;
  Eigen::MatrixXd mb(4, 4);
  mb << value_row(0.0, 4), value_row(t_f, 4), slope_row(0.0, 4), slope_row(t_f, 4);
  Eigen::VectorXd rb(4);
  rb << v0, v1, 0.0, 0.0;
  const Eigen::VectorXd b = solve(mb, rb);

  ThreeLevelAux aux;
  for (int j = 0; j < 5; ++j) aux.poly_a[static_cast<std::size_t>(j)] = a(j);
  for (int j = 0; j < 4; ++j) aux.poly_b[static_cast<std::size_t>(j)] = b(j);
  aux.epsilon = epsilon;
  aux.t_f = t_f;
  aux.direction = direction;
  return aux;
}

/// max over the grid of || dI/dt - i [I, H] ||_F, dI/dt by finite differences.
/// Vanishes (to discretization error) when I is an invariant of H.
template <int N, class InvariantFn>
double invariant_residual(const InvariantFn& i_rule, const HamiltonianRule<N>& h_rule, const TimeGrid& grid) {
  const double step = 1e-4 * grid.span();
  const cplx i(0.0, 1.0);
  double worst = 0.0;
  for (double t : grid.samples()) {
    const Matrix<N> inv = i_rule(t);
    if (inv.rows() != N || inv.cols() != N) throw DomainError("invariant_residual: dimension mismatch");
    const Matrix<N> ham = h_rule(t);
    const Matrix<N> didt = derivative([&](double s) { return Matrix<N>(i_rule(s)); }, t, grid.t_start(),
                                      grid.t_end(), step);
    const Matrix<N> r = didt - i * (inv * ham - ham * inv);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

/// Runtime-dimension entry point: rejects mismatched invariant and Hamiltonian sizes.
template <int N>
double invariant_residual(const std::function<Eigen::MatrixXcd(double)>& i_rule, const HamiltonianRule<N>& h_rule,
                          const TimeGrid& grid) {
  const Eigen::MatrixXcd probe = i_rule(grid.t_start());
  if (probe.rows() != N || probe.cols() != N) {
    std::ostringstream os;
    os << "invariant_residual: invariant is " << probe.rows() << "x" << probe.cols() << ", Hamiltonian is " << N
       << "x" << N;
    throw DomainError(os.str());
  }
  return invariant_residual<N>([&](double t) { return Matrix<N>(i_rule(t)); }, h_rule, grid);
}

/// Sampled Lewis-Riesenfeld phase zeta_n(t) = int_0^t <phi_n| i d/dt' - H |phi_n> dt'.
class LrPhase {
public:
  LrPhase(std::vector<double> times, std::vector<double> values)
      : times_(std::move(times)), values_(std::move(values)) {}

  double operator()(double t) const {
    const auto [k, w] = detail::bracket(times_, t);
    if (w == 0.0) return values_[k];
    return (1.0 - w) * values_[k] + w * values_[k + 1];
  }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double final_value() const { return values_.back(); }

private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Composite 5-point Gauss-Legendre quadrature of the LR phase integrand over each grid interval.
template <int N, class EigenstateFn>
LrPhase lr_phase(const EigenstateFn& phi, const HamiltonianRule<N>& h, const TimeGrid& grid) {
  static constexpr std::array<double, 5> x{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                           0.9061798459386640};
  static constexpr std::array<double, 5> w{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};
  const double lo = grid.t_start();
  const double hi = grid.t_end();
  const double step = 1e-6 * grid.span();
  const cplx i(0.0, 1.0);
  auto integrand = [&](double t) {
    const Vector<N> v = phi(t);
    const Vector<N> dv = derivative([&](double s) { return Vector<N>(phi(s)); }, t, lo, hi, step);
    return (v.dot(i * dv) - v.dot(h(t) * v)).real();
  };
  std::vector<double> times = grid.samples();
  std::vector<double> values(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double a = times[k - 1];
    const double b = times[k];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) acc += w[q] * integrand(mid + half * x[q]);
    values[k] = values[k - 1] + half * acc;
  }
  return LrPhase(std::move(times), std::move(values));
}

enum class Branch2 { plus, minus };
enum class Branch3 { zero, plus, minus };

inline LrPhase lr_phase(Branch2 n, const TwoLevelAux& aux, const HamiltonianRule<2>& eff_h, const TimeGrid& grid) {
  return lr_phase<2>(
      [&](double t) {
        const auto e = eigenstates2(aux, t);
        return n == Branch2::plus ? e.phi_plus.amplitudes() : e.phi_minus.amplitudes();
      },
      eff_h, grid);
}

inline LrPhase lr_phase(Branch3 n, const ThreeLevelAux& aux, const HamiltonianRule<3>& eff_h,
                        const TimeGrid& grid) {
  return lr_phase<3>(
      [&](double t) {
        const auto e = eigenstates3(aux, t);
        switch (n) {
        case Branch3::zero: return e.phi0.amplitudes();
        case Branch3::plus: return e.phi_plus.amplitudes();
        default: return e.phi_minus.amplitudes();
        }
      },
      eff_h, grid);
}

} // namespace chainsta
