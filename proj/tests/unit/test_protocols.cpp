// SPDX-License-Identifier: Apache-2.0
#include <chainsta/protocols.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace chainsta;
using chainsta::testing::Gen;

namespace {

const double k30piMHz = 30.0 * kPi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const ChainwiseLeg& chainwise_leg(const PulseSchedule& s, std::size_t k = 0) {
  return std::get<ChainwiseLeg>(s.segments()[k].leg);
}

} // namespace

// --- protocol 1 ----------------------------------------------------------------

TEST(Protocol1, PeakAmplitudeAtStarredPoint) {
  const auto s = design_protocol1(4.0, 1800 * kPi, kPi / 1.99);
  EXPECT_LT(rel(s.peak_amplitude(), k30piMHz), 5e-3);
  const auto& leg = std::get<Protocol1Leg>(s.segments()[0].leg);
  EXPECT_DOUBLE_EQ(leg.sample(0.3).omega[0], leg.sample(3.7).omega[0]);
  EXPECT_EQ(s.sample(2.0).delta_two, 0.0);
}

TEST(Protocol1, OptimalBetaForcesZeroDetuning) {
  const double tf = 3.0, d = 1500 * kPi;
  const auto s = design_protocol1(tf, d, kPi / 2, DeltaTwoMode::exact_clamped());
  EXPECT_NEAR(s.peak_amplitude(), std::sqrt(2 * d * kPi / tf), 1e-12);
  for (double t : {0.0, 0.1, 1.5, 2.9, 3.0}) EXPECT_EQ(s.sample(t).delta_two, 0.0);
}

TEST(Protocol1, TwoPhotonDetuningAtQuarterTime) {
  const double cot_beta = std::cos(kPi / 1.99) / std::sin(kPi / 1.99);
  EXPECT_NEAR(cot_beta, -0.0078958, 5e-6);
  const auto neg = design_protocol1(4.0, 1800 * kPi, kPi / 1.99, DeltaTwoMode::exact_clamped(),
                                    DeltaTwoFormula::negated);
  EXPECT_NEAR(neg.sample(1.0).delta_two, 6.20e-3, 1e-5);
  const auto inv = design_protocol1(4.0, 1800 * kPi, kPi / 1.99, DeltaTwoMode::exact_clamped());
  EXPECT_NEAR(inv.sample(1.0).delta_two, -6.20e-3, 1e-5);
}

TEST(Protocol1, ClampAndPrintedRatio) {
  const auto s = design_protocol1(4.0, 1800 * kPi, kPi / 1.99, DeltaTwoMode::exact_clamped(50.0));
  EXPECT_EQ(std::abs(s.sample(1e-9).delta_two), 50.0);
  EXPECT_TRUE(std::isfinite(s.sample(0.0).delta_two));
  EXPECT_TRUE(std::isfinite(s.sample(4.0).delta_two));
  const auto p = design_protocol1(4.0, 1800 * kPi, kPi / 1.99, DeltaTwoMode::exact_clamped(1e6),
                                  DeltaTwoFormula::printed_ratio);
  // The division form is of the same order as the Rabi frequency itself.
  EXPECT_GT(std::abs(p.sample(1.0).delta_two), 50.0);
}

TEST(Protocol1, Errors) {
  EXPECT_THROW(design_protocol1(0.0, 1800 * kPi, kPi / 1.99), DomainError);
  EXPECT_THROW(design_protocol1(4.0, 0.0, kPi / 1.99), DomainError);
  EXPECT_THROW(design_protocol1(4.0, 1800 * kPi, 0.0), DomainError);
  EXPECT_THROW(design_protocol1(4.0, 1800 * kPi, kPi), DomainError);
  EXPECT_THROW(design_protocol1(4.0, -1800 * kPi, kPi / 1.99), DomainError);
  EXPECT_NO_THROW(design_protocol1(4.0, -1800 * kPi, -kPi / 1.99));
  EXPECT_THROW(design_protocol1(4.0, 1800 * kPi, kPi / 2, DeltaTwoMode::dropped(), DeltaTwoFormula::printed_ratio),
               DomainError);
}

TEST(Protocol1, PropertyAmplitudeLaw) {
  Gen g(21);
  for (int i = 0; i < 100; ++i) {
    const double tf = g.uniform(0.5, 10.0);
    const double d = g.uniform(100.0, 20000.0);
    const double a = design_protocol1(tf, d, kPi / 1.99).peak_amplitude(3);
    EXPECT_NEAR(design_protocol1(2 * tf, d, kPi / 1.99).peak_amplitude(3), a / std::sqrt(2.0), 1e-12 * a);
    EXPECT_NEAR(design_protocol1(tf, 4 * d, kPi / 1.99).peak_amplitude(3), 2 * a, 1e-12 * a);
  }
}

// --- protocol 2 ----------------------------------------------------------------

TEST(Protocol2, PeakAmplitudeAtStarredPoint) {
  const auto s = design_protocol2(4.0, 1200 * kPi);
  EXPECT_LT(rel(s.peak_amplitude(), k30piMHz), 5e-3);
  EXPECT_NEAR(s.sample(2.0).omega[0], std::sqrt(3 * kPi * 1200 * kPi / 4.0), 1e-10);
}

TEST(Protocol2, EndpointsAndAngle) {
  const auto s = design_protocol2(4.0, 1200 * kPi);
  EXPECT_EQ(s.sample(0.0).omega[0], 0.0);
  EXPECT_EQ(s.sample(4.0).omega[0], 0.0);
  const auto& leg = std::get<Protocol2Leg>(s.segments()[0].leg);
  EXPECT_NEAR(leg.theta(2.0), kPi / 2, 1e-15);
  EXPECT_NEAR(leg.theta(4.0), kPi, 1e-15);
  for (double t : {0.0, 1.0, 3.3}) EXPECT_EQ(s.sample(t).delta_two, 0.0);
}

TEST(Protocol2, Errors) {
  EXPECT_THROW(design_protocol2(0.0, 1200 * kPi), DomainError);
  EXPECT_THROW(design_protocol2(4.0, -1200 * kPi), DomainError);
  EXPECT_THROW(design_protocol2(4.0, 0.0), DomainError);
}

TEST(Protocol2, PropertyPulseAreaOfSquaredField) {
  Gen g(22);
  for (int i = 0; i < 20; ++i) {
    const double tf = g.uniform(1.0, 8.0);
    const double d = g.uniform(500.0, 20000.0);
    const auto s = design_protocol2(tf, d);
    // Composite Simpson; the integrand is a quadratic polynomial in t.
    const int n = 200;
    const double h = tf / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      const double o = s.sample(std::min(k * h, tf)).omega[0];
      acc += w * o * o;
    }
    acc *= h / 3.0;
    EXPECT_NEAR(acc, 2 * d * kPi, 1e-6 * 2 * d * kPi);
  }
}

// --- chainwise -----------------------------------------------------------------

TEST(Chainwise, PeakAndMidpoint) {
  const auto s = design_chainwise(8.0, 1270 * kPi, 0.03);
  EXPECT_LT(rel(s.peak_amplitude(), 40 * kPi), 0.10);
  const auto& leg = chainwise_leg(s);
  const auto [e1, e2] = leg.effective(4.0);
  EXPECT_NEAR(e1, 3 * std::sqrt(2.0) * kPi / 32.0, 1e-12);
  EXPECT_NEAR(e2, 3 * std::sqrt(2.0) * kPi / 32.0, 1e-12);
  EXPECT_NEAR(e1, 0.4165, 1e-4);
  EXPECT_LT(rel(s.sample(4.0).omega[0], 68.6), 1e-2);
  EXPECT_DOUBLE_EQ(s.sample(4.0).omega[0], s.sample(4.0).omega[3]);
}

TEST(Chainwise, EndpointsVanish) {
  for (auto dir : {Direction::creation, Direction::detection}) {
    const auto s = design_chainwise(8.0, 1270 * kPi, 0.03, dir);
    for (double t : {0.0, 8.0}) {
      for (double o : s.sample(t).omega) EXPECT_NEAR(o, 0.0, 1e-9);
    }
  }
}

TEST(Chainwise, Errors) {
  EXPECT_THROW(design_chainwise(0.0, 1270 * kPi, 0.03), DomainError);
  EXPECT_THROW(design_chainwise(8.0, -1.0, 0.03), DomainError);
  EXPECT_THROW(design_chainwise(8.0, 1270 * kPi, 5e-4), DomainError);
  EXPECT_THROW(design_chainwise(8.0, 1270 * kPi, kPi / 4), DomainError);
  EXPECT_NO_THROW(design_chainwise(8.0, 1270 * kPi, 1e-3));
}

TEST(Chainwise, PropertyChannelIdentity) {
  Gen g(23);
  for (int i = 0; i < 40; ++i) {
    const double tf = g.uniform(2.0, 15.0);
    const auto s = design_chainwise(tf, g.uniform(500.0, 20000.0), g.uniform(1e-3, 0.7),
                                    g.integer(0, 1) ? Direction::creation : Direction::detection);
    for (int k = 0; k < 50; ++k) {
      const auto p = s.sample(g.uniform(0.0, tf));
      const double r = std::hypot(p.omega[1], p.omega[2]);
      EXPECT_EQ(p.omega[0], p.omega[3]);
      EXPECT_LE(std::abs(p.omega[0] - r), 1e-9 * std::max(r, 1e-300));
    }
  }
}

TEST(Chainwise, PropertyReconstructionUpToGlobalSign) {
  Gen g(24);
  for (int i = 0; i < 20; ++i) {
    const double tf = g.uniform(2.0, 15.0);
    const auto s = design_chainwise(tf, g.uniform(500.0, 20000.0), g.uniform(0.01, 0.5));
    const auto eff = effective_three_level(s);
    const auto& leg = chainwise_leg(s);
    for (int k = 0; k < 50; ++k) {
      const double t = g.uniform(0.01 * tf, 0.99 * tf);
      const auto [e1, e2] = leg.effective(t);
      EXPECT_NEAR(eff.omega_e1(t), -e1, 1e-9 * std::abs(e1) + 1e-15);
      EXPECT_NEAR(eff.omega_e2(t), -e2, 1e-9 * std::abs(e2) + 1e-15);
    }
  }
}

TEST(Chainwise, GaugeConjugatesDesignedChain) {
  const auto s = design_chainwise(8.0, 1270 * kPi, 0.03);
  const auto lab = effective_three_level(s).hamiltonian();
  const auto& leg = chainwise_leg(s);
  const Matrix<3> u = chainwise_gauge();
  for (double t : {0.5, 2.0, 4.0, 7.1}) {
    const auto [a, b] = leg.effective(t);
    Matrix<3> h = Matrix<3>::Zero();
    h(0, 1) = h(1, 0) = 0.5 * a;
    h(1, 2) = h(2, 1) = 0.5 * b;
    EXPECT_LT((lab(t) - u * h * u.adjoint()).norm(), 1e-9 * h.norm());
  }
}

TEST(Chainwise, PropertyPeakDecreasesWithDuration) {
  Gen g(25);
  for (int i = 0; i < 20; ++i) {
    const double tf = g.uniform(2.0, 10.0);
    const double d = g.uniform(500.0, 5000.0);
    EXPECT_GT(design_chainwise(tf, d, 0.03).peak_amplitude(801), design_chainwise(1.3 * tf, d, 0.03).peak_amplitude(801));
  }
}

// --- round trips ---------------------------------------------------------------

TEST(Roundtrip, DurationsAndHold) {
  const auto rt = build_roundtrip(design_protocol2(4.0, 1200 * kPi), 0.1);
  EXPECT_NEAR(rt.duration(), 8.1, 1e-12);
  ASSERT_EQ(rt.segments().size(), 3u);
  EXPECT_EQ(rt.segments()[1].kind, SegmentKind::hold);
  EXPECT_EQ(rt.segments()[2].kind, SegmentKind::backward);
  for (int k = 0; k <= 100; ++k) {
    const auto p = rt.segments()[1].sample(0.001 * k);
    for (double o : p.omega) EXPECT_EQ(o, 0.0);
    EXPECT_EQ(p.delta_two, 0.0);
  }
  EXPECT_EQ(rt.segment_index(4.05), 1u);
}

TEST(Roundtrip, LambdaReplaysIdenticalPulses) {
  const auto leg = design_protocol1(4.0, 1800 * kPi, kPi / 1.99, DeltaTwoMode::exact_clamped());
  const auto rt = build_roundtrip(leg, 0.1);
  const Segment& back = rt.segments()[2];
  EXPECT_EQ(back.duration, 4.0);
  for (int k = 0; k <= 400; ++k) {
    const double t = 0.01 * k;
    const auto a = leg.sample(t);
    const auto b = back.sample(t);
    EXPECT_EQ(a.omega[0], b.omega[0]);
    EXPECT_EQ(a.delta_two, b.delta_two);
  }
}

TEST(Roundtrip, ChainwiseReturnMirrorsForward) {
  const double tf = 8.0;
  const auto rt = build_roundtrip(design_chainwise(tf, 1270 * kPi, 0.03), 0.1);
  const auto& back = chainwise_leg(rt, 2);
  EXPECT_NEAR(back.aux.vartheta(0.0), kPi / 2, 1e-12);
  EXPECT_NEAR(back.aux.vartheta(tf), 0.0, 1e-12);
  for (int k = 0; k <= 200; ++k) {
    const double t = tf * k / 200.0;
    const auto f = rt.segments()[0].sample(t);
    const auto b = rt.segments()[2].sample(tf - t);
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_NEAR(std::abs(b.omega[c]), std::abs(f.omega[c]), 1e-9 * (1.0 + std::abs(f.omega[c]))) << "t = " << t;
    }
  }
}

TEST(Roundtrip, ZeroHoldOmitsSegment) {
  const auto rt = build_roundtrip(design_protocol2(4.0, 1200 * kPi), 0.0);
  EXPECT_EQ(rt.segments().size(), 2u);
  EXPECT_NEAR(rt.duration(), 8.0, 1e-12);
}

TEST(Roundtrip, Errors) {
  const auto leg = design_protocol2(4.0, 1200 * kPi);
  EXPECT_THROW(build_roundtrip(leg, -0.1), DomainError);
  EXPECT_THROW(build_roundtrip(build_roundtrip(leg, 0.1), 0.1), DomainError);
  EXPECT_THROW(build_roundtrip(design_chainwise(8.0, 1270 * kPi, 0.03, Direction::detection), 0.1), DomainError);
}

// --- schedule access and CSV ---------------------------------------------------

TEST(PulseSchedule, SchemeGuards) {
  const auto lam = design_protocol2(4.0, 1200 * kPi);
  const auto m = design_chainwise(8.0, 1270 * kPi, 0.03);
  EXPECT_THROW(lam.m_params(), DomainError);
  EXPECT_THROW(m.lambda_params(), DomainError);
  EXPECT_THROW(lam.sample(-0.1), DomainError);
  EXPECT_THROW(lam.sample(4.1), DomainError);
  EXPECT_EQ(lam.channel_names(), std::vector<std::string>{"omega"});
  EXPECT_EQ(m.channel_names().size(), 4u);
}

TEST(ScheduleCsv, HeaderAndRows) {
  std::ostringstream os;
  write_schedule_csv(design_protocol1(4.0, 1800 * kPi, kPi / 1.99), os, 5);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t_us,omega,delta_two");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_THROW(write_schedule_csv(design_protocol2(4.0, 1.0), os, 1), DomainError);
}

TEST(ScheduleCsv, RoundTripPreservesSamples) {
  for (const auto& s : {build_roundtrip(design_protocol2(4.0, 1200 * kPi), 0.1),
                        build_roundtrip(design_chainwise(8.0, 1270 * kPi, 0.03), 0.1)}) {
    std::stringstream io;
    write_schedule_csv(s, io, 401);
    const auto back = read_schedule_csv(io, s.delta_single());
    EXPECT_EQ(back.scheme(), s.scheme());
    EXPECT_NEAR(back.duration(), s.duration(), 1e-12);
    for (int k = 0; k <= 400; ++k) {
      // Knots of the first leg coincide with written rows.
      const double t = s.segments()[0].duration * k / 400.0;
      const auto a = s.sample(t);
      const auto b = back.sample(t);
      for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(a.omega[c], b.omega[c], 1e-9 * (1.0 + std::abs(a.omega[c])));
    }
  }
}

TEST(ScheduleCsv, RejectsMalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_schedule_csv(empty, 1.0), DomainError);
  std::istringstream header("t,x\n0,1\n1,2\n");
  EXPECT_THROW(read_schedule_csv(header, 1.0), DomainError);
  std::istringstream ragged("t_us,omega,delta_two\n0,1,0\n1,2\n");
  EXPECT_THROW(read_schedule_csv(ragged, 1.0), DomainError);
  std::istringstream single("t_us,omega,delta_two\n0,1,0\n");
  EXPECT_THROW(read_schedule_csv(single, 1.0), DomainError);
}
