// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chainsta/qcore/dopri5.hpp>
#include <chainsta/qcore/types.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace chainsta {

inline constexpr double kDefaultTol = 1e-8;

/// Sampled solution of i d(psi)/dt = H psi.
template <int N>
struct StateTrajectory {
  std::vector<double> times;
  std::vector<Vector<N>> states;
  IntegratorStats stats;

  double population(int level, std::size_t k) const { return std::norm(states[k](level)); }
  double norm2(std::size_t k) const { return states[k].squaredNorm(); }
  StateVector<N> final_state() const { return StateVector<N>(states.back()); }
};

/// Sampled solution of the lossy Liouville-von Neumann equation.
template <int N>
struct DensityTrajectory {
  std::vector<double> times;
  std::vector<Matrix<N>> rhos;
  IntegratorStats stats;
  /// Largest trace increase between consecutive accepted steps (<= 0 ideally).
  double max_trace_increase = 0.0;

  double population(int level, std::size_t k) const { return rhos[k](level, level).real(); }
  double trace(std::size_t k) const { return rhos[k].trace().real(); }
};

namespace detail {

inline IntegratorOptions options_for(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) {
    std::ostringstream os;
    os << "tolerance " << tol << " outside [1e-12, 1e-4]";
    throw DomainError(os.str());
  }
  IntegratorOptions opt;
  opt.rtol = tol;
  opt.atol = tol * 1e-2;
  return opt;
}

template <int N>
void check_samples_hermitian(const HamiltonianRule<N>& h, const std::vector<double>& times) {
  for (double t : times) h.check_hermitian(t);
}

} // namespace detail

/// Propagates a pure state under H(t) and samples it on the grid.
template <int N>
StateTrajectory<N> propagate_state(const HamiltonianRule<N>& h, const StateVector<N>& psi0,
                                   const TimeGrid& grid, double tol = kDefaultTol) {
  if (std::abs(psi0.norm2() - 1.0) > kNormSlack) {
    throw DomainError("propagate_state: initial state is not normalized");
  }
  const IntegratorOptions opt = detail::options_for(tol);
  StateTrajectory<N> traj;
  traj.times = grid.samples();
  detail::check_samples_hermitian(h, traj.times);

  const cplx minus_i(0.0, -1.0);
  auto rhs = [&h, minus_i](double t, const Vector<N>& psi) -> Vector<N> {
    return (minus_i * (h(t) * psi)).eval();
  };
  traj.states = integrate_dopri5(rhs, grid.t_start(), psi0.amplitudes(), traj.times, opt, &traj.stats);
  return traj;
}

/// Propagates rho under d(rho)/dt = -i[H, rho] - 1/2 {diag(gamma), rho}.
/// Losses leave the system, so the trace is the surviving fraction.
template <int N>
DensityTrajectory<N> propagate_density(const HamiltonianRule<N>& h, const DecayVector<N>& gamma,
                                       const DensityMatrix<N>& rho0, const TimeGrid& grid,
                                       double tol = kDefaultTol) {
  const IntegratorOptions opt = detail::options_for(tol);
  DensityTrajectory<N> traj;
  traj.times = grid.samples();
  detail::check_samples_hermitian(h, traj.times);

  // Anticommutator with a diagonal matrix: entry (j, k) scales by gamma_j + gamma_k.
  Matrix<N> half_sum;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < N; ++k) half_sum(j, k) = 0.5 * (gamma[j] + gamma[k]);
  }
  const bool lossless = gamma.all_zero();
  const cplx minus_i(0.0, -1.0);
  auto rhs = [&h, &half_sum, lossless, minus_i](double t, const Matrix<N>& rho) -> Matrix<N> {
    const Matrix<N> hr = h(t) * rho;
    Matrix<N> d = minus_i * (hr - hr.adjoint());
    if (!lossless) d -= half_sum.cwiseProduct(rho);
    return d;
  };

  double prev_trace = rho0.trace();
  double worst = 0.0;
  std::function<void(double, const Matrix<N>&)> observe = [&](double, const Matrix<N>& rho) {
    const double tr = rho.trace().real();
    worst = std::max(worst, tr - prev_trace);
    prev_trace = tr;
  };
  traj.rhos = integrate_dopri5(rhs, grid.t_start(), rho0.matrix(), traj.times, opt, &traj.stats, observe);
  traj.max_trace_increase = worst;
  return traj;
}

namespace detail {

inline std::pair<std::size_t, double> bracket(const std::vector<double>& times, double t) {
  if (times.empty() || t < times.front() || t > times.back()) {
    std::ostringstream os;
    os << "time " << t << " outside trajectory range";
    throw DomainError(os.str());
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.end()) return {times.size() - 1, 0.0};
  const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  const double w = (t - times[k]) / (times[k + 1] - times[k]);
  return {k, w};
}

inline void check_level(int level, int n) {
  if (level < 0 || level >= n) {
    throw DomainError("level index " + std::to_string(level) + " out of range for " +
                      std::to_string(n) + " levels");
  }
}

} // namespace detail

/// |c_level(t)|^2, linearly interpolated between samples.
template <int N>
double population(const StateTrajectory<N>& traj, int level, double t) {
  detail::check_level(level, N);
  const auto [k, w] = detail::bracket(traj.times, t);
  const double p0 = traj.population(level, k);
  if (w == 0.0) return p0;
  return (1.0 - w) * p0 + w * traj.population(level, k + 1);
}

/// rho_{level,level}(t), linearly interpolated between samples.
template <int N>
double population(const DensityTrajectory<N>& traj, int level, double t) {
  detail::check_level(level, N);
  const auto [k, w] = detail::bracket(traj.times, t);
  const double p0 = traj.population(level, k);
  if (w == 0.0) return p0;
  return (1.0 - w) * p0 + w * traj.population(level, k + 1);
}

/// |<a|b>|^2 for normalized states.
template <int N>
double fidelity(const StateVector<N>& a, const StateVector<N>& b) {
  if (std::abs(a.norm2() - 1.0) > 1e-6 || std::abs(b.norm2() - 1.0) > 1e-6) {
    throw DomainError("fidelity: states must be normalized");
  }
  return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

/// Runtime-dimension variant: throws when the dimensions differ.
inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) {
    throw DomainError("fidelity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  if (std::abs(a.squaredNorm() - 1.0) > 1e-6 || std::abs(b.squaredNorm() - 1.0) > 1e-6) {
    throw DomainError("fidelity: states must be normalized");
  }
  return std::min(1.0, std::norm(a.dot(b)));
}

} // namespace chainsta
