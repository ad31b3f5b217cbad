// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded generators for property tests.

#include <chainsta/qcore.hpp>

#include <random>

namespace chainsta::testing {

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  cplx complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  template <int N>
  Matrix<N> hermitian(double scale = 1.0) {
    Matrix<N> a;
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) a(j, k) = complex(scale);
    }
    return (0.5 * (a + a.adjoint())).eval();
  }

  template <int N>
  StateVector<N> state() {
    Vector<N> v;
    for (int j = 0; j < N; ++j) v(j) = complex();
    return StateVector<N>::normalized(v);
  }

  /// Mixed state with trace in (0.2, 1].
  template <int N>
  DensityMatrix<N> density() {
    Matrix<N> a;
    for (int j = 0; j < N; ++j) {
      for (int k = 0; k < N; ++k) a(j, k) = complex();
    }
    Matrix<N> rho = a * a.adjoint();
    rho *= uniform(0.2, 1.0) / rho.trace().real();
    return DensityMatrix<N>((0.5 * (rho + rho.adjoint())).eval());
  }

  /// Smooth H(t) = A + B sin(w t) + C cos(2 w t) with random Hermitian A, B, C.
  template <int N>
  HamiltonianRule<N> smooth_hamiltonian(double scale = 1.0) {
    const Matrix<N> a = hermitian<N>(scale), b = hermitian<N>(scale), c = hermitian<N>(scale);
    const double w = uniform(0.2, 2.0);
    return HamiltonianRule<N>([=](double t) { return (a + std::sin(w * t) * b + std::cos(2 * w * t) * c).eval(); });
  }

private:
  std::mt19937_64 rng_;
};

} // namespace chainsta::testing
