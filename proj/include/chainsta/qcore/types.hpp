// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chainsta/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace chainsta {

using cplx = std::complex<double>;

template <int N>
using Matrix = Eigen::Matrix<cplx, N, N>;

template <int N>
using Vector = Eigen::Matrix<cplx, N, 1>;

// Hermiticity and PSD thresholds used by every validation in the library.
inline constexpr double kHamiltonianHermitianTol = 1e-12;
inline constexpr double kDensityHermitianTol = 1e-10;
inline constexpr double kDensityPsdTol = -1e-8;
inline constexpr double kNormSlack = 1e-9;

/// Largest entrywise |A - A^dagger|.
template <int N>
double max_asymmetry(const Matrix<N>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Pure state of an N-level system; squared norm never exceeds 1 + 1e-9.
template <int N>
class StateVector {
public:
  StateVector() : amps_(Vector<N>::Zero()) { amps_(0) = 1.0; }

  explicit StateVector(const Vector<N>& amps) : amps_(amps) {
    if (!amps_.allFinite()) throw DomainError("StateVector: non-finite amplitude");
    if (amps_.squaredNorm() > 1.0 + kNormSlack) {
      std::ostringstream os;
      os << "StateVector: squared norm " << amps_.squaredNorm() << " exceeds 1";
      throw DomainError(os.str());
    }
  }

  static StateVector basis(int k) {
    if (k < 0 || k >= N) throw DomainError("StateVector::basis: index out of range");
    Vector<N> v = Vector<N>::Zero();
    v(k) = 1.0;
    return StateVector(v);
  }

  /// Normalizes an arbitrary non-zero vector.
  static StateVector normalized(const Vector<N>& v) {
    const double n = v.norm();
    if (!(n > 0.0)) throw DomainError("StateVector::normalized: zero vector");
    return StateVector(v / n);
  }

  const Vector<N>& amplitudes() const noexcept { return amps_; }
  cplx operator[](int k) const { return amps_(k); }
  double norm2() const { return amps_.squaredNorm(); }
  static constexpr int dimension() { return N; }

private:
  Vector<N> amps_;
};

/// Density operator: Hermitian, trace in (0, 1], positive semidefinite.
template <int N>
class DensityMatrix {
public:
  explicit DensityMatrix(const Matrix<N>& rho) : rho_(rho) {
    if (!rho_.allFinite()) throw DomainError("DensityMatrix: non-finite entry");
    const double asym = max_asymmetry<N>(rho_);
    if (asym > kDensityHermitianTol) {
      std::ostringstream os;
      os << "DensityMatrix: not Hermitian (max asymmetry " << asym << ")";
      throw DomainError(os.str());
    }
    const double tr = rho_.trace().real();
    if (!(tr > 0.0) || tr > 1.0 + kNormSlack) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << tr << " outside (0, 1]";
      throw DomainError(os.str());
    }
    const Matrix<N> herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix<N>> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kDensityPsdTol) {
      std::ostringstream os;
      os << "DensityMatrix: not positive semidefinite (min eigenvalue "
         << es.eigenvalues().minCoeff() << ")";
      throw DomainError(os.str());
    }
  }

  static DensityMatrix pure(const StateVector<N>& psi) {
    const Vector<N>& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
  }

  static DensityMatrix basis(int k) { return pure(StateVector<N>::basis(k)); }

  const Matrix<N>& matrix() const noexcept { return rho_; }
  double trace() const { return rho_.trace().real(); }
  static constexpr int dimension() { return N; }

private:
  Matrix<N> rho_;
};

/// Per-level loss rates out of the system (rad/us).
template <int N>
class DecayVector {
public:
  DecayVector() { rates_.fill(0.0); }

  explicit DecayVector(const std::array<double, N>& rates) : rates_(rates) {
    for (double r : rates_) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("DecayVector: rates must be finite and >= 0");
    }
  }

  static DecayVector from(const std::vector<double>& rates) {
    if (rates.size() != static_cast<std::size_t>(N)) {
      throw DomainError("DecayVector: expected " + std::to_string(N) + " rates, got " +
                        std::to_string(rates.size()));
    }
    std::array<double, N> a{};
    std::copy(rates.begin(), rates.end(), a.begin());
    return DecayVector(a);
  }

  double operator[](int k) const { return rates_[static_cast<std::size_t>(k)]; }
  const std::array<double, N>& rates() const noexcept { return rates_; }
  bool all_zero() const {
    return std::all_of(rates_.begin(), rates_.end(), [](double r) { return r == 0.0; });
  }

private:
  std::array<double, N> rates_;
};

/// Output sampling window [t_start, t_end] with n_samples uniform points, ends included.
class TimeGrid {
public:
  TimeGrid(double t_start, double t_end, int n_samples)
      : t_start_(t_start), t_end_(t_end), n_(n_samples) {
    if (!(t_end > t_start)) throw DomainError("TimeGrid: t_end must exceed t_start");
    if (n_samples < 2) throw DomainError("TimeGrid: need at least 2 samples");
  }

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  double span() const noexcept { return t_end_ - t_start_; }
  int size() const noexcept { return n_; }

  double at(int k) const {
    if (k == n_ - 1) return t_end_;
    return t_start_ + span() * static_cast<double>(k) / static_cast<double>(n_ - 1);
  }

  std::vector<double> samples() const {
    std::vector<double> t(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) t[static_cast<std::size_t>(k)] = at(k);
    return t;
  }

private:
  double t_start_;
  double t_end_;
  int n_;
};

/// Time-dependent Hamiltonian H(t) in rad/us (hbar = 1).
template <int N>
class HamiltonianRule {
public:
  using Evaluator = std::function<Matrix<N>(double)>;

  HamiltonianRule() : eval_([](double) { return Matrix<N>::Zero().eval(); }) {}
  explicit HamiltonianRule(Evaluator eval) : eval_(std::move(eval)) {}

  Matrix<N> operator()(double t) const { return eval_(t); }
  static constexpr int dimension() { return N; }

  /// Throws NumericalError when H(t) is not Hermitian within tolerance.
  void check_hermitian(double t) const {
    const Matrix<N> h = eval_(t);
    if (!h.allFinite()) {
      std::ostringstream os;
      os << "Hamiltonian is not finite at t = " << t;
      throw NumericalError(os.str());
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double asym = max_asymmetry<N>(h);
    if (asym > kHamiltonianHermitianTol * scale) {
      std::ostringstream os;
      os << "Hamiltonian is not Hermitian at t = " << t << " (max asymmetry " << asym << ")";
      throw NumericalError(os.str());
    }
  }

private:
  Evaluator eval_;
};

} // namespace chainsta
