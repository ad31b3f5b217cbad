// SPDX-License-Identifier: Apache-2.0
#include <chainsta/protocols.hpp>
#include <chainsta/schemes.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

#include <cmath>

using namespace chainsta;
using chainsta::testing::Gen;

namespace {

LambdaParams lambda_const(double omega, double delta, double delta_two, double duration = 1.0) {
  LambdaParams p;
  p.omega1 = p.omega2 = constant_channel(omega);
  p.delta_single = delta;
  p.delta_two = constant_channel(delta_two);
  p.duration = duration;
  return p;
}

MParams m_const(double o1, double o2, double o3, double o4, double delta) {
  MParams p;
  p.omega = {constant_channel(o1), constant_channel(o2), constant_channel(o3), constant_channel(o4)};
  p.delta_single = delta;
  p.stark_balanced = true;
  return p;
}

double full_vs_effective_gap(const PulseSchedule& s) {
  const TimeGrid g(0.0, s.duration(), 2);
  const auto full = propagate_state<3>(s.lambda_hamiltonian(), StateVector<3>::basis(0), g, 1e-10);
  const auto eff = propagate_state<2>(effective_two_level(s).hamiltonian(), StateVector<2>::basis(0), g, 1e-10);
  return std::abs(full.population(2, 1) - eff.population(1, 1));
}

} // namespace

TEST(BuildLambda, ZeroFieldsGiveDiagonal) {
  const auto h = build_lambda(lambda_const(0.0, 7.0, 0.3))(0.4);
  Matrix<3> want = Matrix<3>::Zero();
  want(1, 1) = 7.0;
  want(2, 2) = 0.3;
  EXPECT_EQ(h, want);
}

TEST(BuildLambda, Placement) {
  const auto h = build_lambda(lambda_const(2.0, 10.0, 1.0))(1.3);
  EXPECT_EQ(h(0, 1), cplx(1.0));
  EXPECT_EQ(h(1, 2), cplx(1.0));
  EXPECT_EQ(h(0, 2), cplx(0.0));
  EXPECT_EQ(h(1, 1), cplx(10.0));
  EXPECT_EQ(h(2, 2), cplx(1.0));
}

TEST(BuildLambda, EigenvaluesAgainstClosedForm) {
  // [[0,1,0],[1,100,1],[0,1,0]]: dark state at 0 and (100 -+ sqrt(100^2 + 8)) / 2.
  const Matrix<3> h = build_lambda(lambda_const(2.0, 100.0, 0.0))(0.0);
  Eigen::SelfAdjointEigenSolver<Matrix<3>> es(h);
  const double r = std::sqrt(100.0 * 100.0 + 8.0);
  EXPECT_NEAR(es.eigenvalues()(0), (100.0 - r) / 2.0, 1e-10);
  EXPECT_NEAR(es.eigenvalues()(1), 0.0, 1e-10);
  EXPECT_NEAR(es.eigenvalues()(2), (100.0 + r) / 2.0, 1e-10);
  EXPECT_NEAR(es.eigenvalues()(0), -0.0200, 1e-3);
  EXPECT_NEAR(es.eigenvalues()(2), 100.0200, 1e-3);
}

TEST(ReduceLambda, Arithmetic) {
  const auto e = reduce_lambda(lambda_const(2.0, 100.0, 0.5));
  EXPECT_DOUBLE_EQ(e.omega_e(0.0), -0.02);
  EXPECT_DOUBLE_EQ(e.delta_e(0.0), -0.5);
  EXPECT_TRUE(e.warnings.empty());
}

TEST(ReduceLambda, Errors) {
  EXPECT_THROW(reduce_lambda(lambda_const(1.0, 0.0, 0.0)), DomainError);
  LambdaParams p = lambda_const(1.0, 100.0, 0.0);
  p.omega2 = constant_channel(1.1);
  EXPECT_THROW(reduce_lambda(p), DomainError);
}

TEST(ReduceLambda, RegimeViolationWarnsButProceeds) {
  const auto e = reduce_lambda(lambda_const(5.0, 20.0, 0.0));
  ASSERT_EQ(e.warnings.size(), 1u);
  EXPECT_NE(e.warnings[0].find("regime"), std::string::npos);
  EXPECT_DOUBLE_EQ(e.omega_e(0.0), -25.0 / 40.0);
  // |delta| counts toward the regime check as well
  EXPECT_EQ(reduce_lambda(lambda_const(1.0, 20.0, 3.0)).warnings.size(), 1u);
}

TEST(ReduceLambda, FullVersusEffectivePropagation) {
  const double tf = 20.0;
  const LambdaParams p = lambda_const(1.0, 50.0, 0.0, tf);
  const TimeGrid g(0.0, tf, 201);
  const auto full = propagate_state<3>(build_lambda(p), StateVector<3>::basis(0), g, 1e-10);
  const auto eff = propagate_state<2>(reduce_lambda(p).hamiltonian(), StateVector<2>::basis(0), g, 1e-10);
  EXPECT_NEAR(full.population(2, 200), eff.population(1, 200), 0.02);
}

TEST(ReduceLambda, PropertyReembeddingRecoversAmplitude) {
  Gen g(101);
  for (int i = 0; i < 200; ++i) {
    const double omega = g.uniform(-50.0, 50.0);
    const double delta = (g.integer(0, 1) ? 1.0 : -1.0) * g.uniform(10.0, 1e4);
    const auto e = reduce_lambda(lambda_const(omega, delta, 0.0));
    EXPECT_NEAR(std::sqrt(2.0 * std::abs(delta) * std::abs(e.omega_e(0.0))), std::abs(omega), 1e-12 * (1 + std::abs(omega)));
  }
}

TEST(ReduceLambda, PropertyErrorShrinksWithDetuning) {
  // Fixed protocol 2 shape; Delta = r * max|Omega| with peak^2 = 3 pi Delta / t_f.
  const double tf = 4.0;
  double prev = 1.0;
  for (double r : {20.0, 60.0, 200.0}) {
    const double delta = r * r * 3.0 * kPi / tf;
    const auto s = design_protocol2(tf, delta);
    EXPECT_NEAR(delta / s.peak_amplitude(), r, 1e-3 * r);
    const double gap = full_vs_effective_gap(s);
    EXPECT_LT(gap, prev) << "r = " << r;
    prev = gap;
  }
}

TEST(BuildM, ZeroFieldsGiveDiagonal) {
  const auto h = build_m(m_const(0, 0, 0, 0, 100.0))(0.0);
  Matrix<5> want = Matrix<5>::Zero();
  want(1, 1) = want(3, 3) = 100.0;
  EXPECT_EQ(h, want);
}

TEST(BuildM, Placement) {
  const double r2 = std::sqrt(2.0);
  const auto h = build_m(m_const(2, r2, r2, 2, 100.0))(0.0);
  EXPECT_EQ(h(0, 1), cplx(1.0));
  EXPECT_EQ(h(1, 2), cplx(r2 / 2));
  EXPECT_EQ(h(2, 3), cplx(r2 / 2));
  EXPECT_EQ(h(3, 4), cplx(1.0));
  for (int j = 0; j < 5; ++j) {
    for (int k = j + 2; k < 5; ++k) EXPECT_EQ(h(j, k), cplx(0.0));
  }
}

TEST(BuildSchemes, PropertyExactlyHermitian) {
  Gen g(202);
  for (int i = 0; i < 200; ++i) {
    const auto hm = build_m(m_const(g.uniform(-9, 9), g.uniform(-9, 9), g.uniform(-9, 9), g.uniform(-9, 9),
                                    g.uniform(-1e3, 1e3)))(g.uniform(0, 5));
    EXPECT_EQ((hm - hm.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    LambdaParams p = lambda_const(g.uniform(-9, 9), g.uniform(-1e3, 1e3), g.uniform(-5, 5));
    p.omega2 = constant_channel(g.uniform(-9, 9));
    const auto hl = build_lambda(p)(0.0);
    EXPECT_EQ((hl - hl.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(ReduceM, Arithmetic) {
  const double r2 = std::sqrt(2.0);
  const auto e = reduce_m(m_const(2, r2, r2, 2, 100.0));
  EXPECT_NEAR(e.omega_e1(0.0), -0.014142, 1e-6);
  EXPECT_NEAR(e.omega_e2(0.0), -0.014142, 1e-6);
  EXPECT_NEAR(e.omega_e1(0.0), -r2 * 2.0 / 200.0, 1e-15);
}

TEST(ReduceM, SingleLinkLimit) {
  const double c = 1.5;
  const auto e = reduce_m(m_const(c, c, 0.0, c, 100.0));
  EXPECT_DOUBLE_EQ(e.omega_e1(0.0), -c * c / 200.0);
  EXPECT_EQ(e.omega_e2(0.0), 0.0);
}

TEST(ReduceM, StarkBalanceViolationNamesMaximum) {
  try {
    reduce_m(m_const(2.2, std::sqrt(2.0), std::sqrt(2.0), 2.0, 100.0));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("violation 0.0909"), std::string::npos) << msg; // |2.2 - 2| / 2.2
  }
  EXPECT_THROW(reduce_m(m_const(2.0, std::sqrt(2.0), std::sqrt(2.0), 2.0, 0.0)), DomainError);
  EXPECT_NEAR(stark_balance_violation(m_const(2.0, std::sqrt(2.0), std::sqrt(2.0), 2.0, 1.0)), 0.0, 1e-15);
}

TEST(ReduceM, FullVersusEffectiveChainwise) {
  const auto s = design_chainwise(8.0, 1270.0 * kPi, 0.03);
  const TimeGrid g(0.0, 8.0, 2);
  const auto full = propagate_state<5>(s.m_hamiltonian(), StateVector<5>::basis(0), g, 1e-10);
  const auto eff = propagate_state<3>(effective_three_level(s).hamiltonian(), StateVector<3>::basis(0), g, 1e-10);
  EXPECT_NEAR(full.population(4, 1), eff.population(2, 1), 0.03);
}

TEST(ReduceM, PropertyGaugeFlipLeavesPopulations) {
  for (std::uint64_t seed = 300; seed < 305; ++seed) {
    Gen g(seed);
    const double a = g.uniform(0.1, 2.0), b = g.uniform(0.1, 2.0), w = g.uniform(0.5, 3.0);
    auto chain = [&](double sign) {
      EffThreeLevel e;
      e.omega_e1 = [=](double t) { return sign * a * std::sin(w * t); };
      e.omega_e2 = [=](double t) { return sign * b * std::cos(0.5 * w * t); };
      e.duration = 5.0;
      return e;
    };
    const auto psi0 = g.state<3>();
    const TimeGrid grid(0.0, 5.0, 26);
    // diag(1,-1,1) maps the flipped solution onto the original one.
    const StateVector<3> psi0_flipped((chainwise_gauge() * psi0.amplitudes()).eval());
    const auto p = propagate_state<3>(chain(1.0).hamiltonian(), psi0, grid, 1e-10);
    const auto q = propagate_state<3>(chain(-1.0).hamiltonian(), psi0_flipped, grid, 1e-10);
    const auto q_same_start = propagate_state<3>(chain(-1.0).hamiltonian(), StateVector<3>::basis(0), grid, 1e-10);
    const auto p_same_start = propagate_state<3>(chain(1.0).hamiltonian(), StateVector<3>::basis(0), grid, 1e-10);
    for (std::size_t k = 0; k < grid.samples().size(); ++k) {
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(p.population(j, k), q.population(j, k), 1e-8);
        EXPECT_NEAR(p_same_start.population(j, k), q_same_start.population(j, k), 1e-8);
      }
    }
  }
}

TEST(AdiabaticityMargin, ConstantIsZero) {
  EffTwoLevel e{constant_channel(0.7), constant_channel(-0.2), 1.0, {}};
  EXPECT_EQ(adiabaticity_margin(e, TimeGrid(0, 1, 11)), 0.0);
}

TEST(AdiabaticityMargin, LinearSweep) {
  EffTwoLevel e{constant_channel(1.0), [](double t) { return t; }, 20.0, {}};
  EXPECT_NEAR(adiabaticity_margin(e, TimeGrid(-10.0, 10.0, 201)), 0.5, 1e-9);
}

TEST(AdiabaticityMargin, UndefinedWhenGapCloses) {
  EffTwoLevel e{constant_channel(0.0), constant_channel(0.0), 1.0, {}};
  EXPECT_THROW(adiabaticity_margin(e, TimeGrid(0, 1, 3)), DomainError);
}

TEST(AdiabaticityMargin, Protocol2EffectivePulse) {
  const auto e = effective_two_level(design_protocol2(4.0, 1200.0 * kPi));
  // Delta_e vanishes identically, so the margin is finite (zero) on the open interval
  // and undefined at the end points where omega_e = 0 as well.
  const double m = adiabaticity_margin(e, TimeGrid(1e-3, 4.0 - 1e-3, 401));
  EXPECT_TRUE(std::isfinite(m));
  EXPECT_EQ(m, 0.0);
  EXPECT_THROW(adiabaticity_margin(e, TimeGrid(0.0, 4.0, 401)), DomainError);
}
