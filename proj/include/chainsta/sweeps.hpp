// SPDX-License-Identifier: Apache-2.0
#pragma once

// Parameter sweeps over (t_f, Delta), single scenarios and round trips.

#include <chainsta/protocols.hpp>
#include <chainsta/qcore.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace chainsta {

/// Inclusive uniform axis [min, max] with count points.
struct AxisRange {
  double min = 0.0;
  double max = 0.0;
  int count = 2;

  void validate(const char* name) const {
    if (count < 2) throw DomainError(std::string(name) + ": axis needs at least 2 points");
    if (!(min > 0.0) || !(max > min)) throw DomainError(std::string(name) + ": axis must satisfy 0 < min < max");
  }
  std::vector<double> values() const { return TimeGrid(min, max, count).samples(); }
};

/// Everything needed to design one leg.
struct ProtocolOptions {
  Protocol protocol = Protocol::p2;
  double t_f = 4.0;
  double delta = 1200.0 * kPi;
  double beta = kPi / 1.99;
  double epsilon = 0.03;
  DeltaTwoMode mode = DeltaTwoMode::dropped();
  DeltaTwoFormula formula = DeltaTwoFormula::invariant;
};

inline Scheme scheme_of(Protocol p) { return p == Protocol::chainwise ? Scheme::m5 : Scheme::lambda3; }

inline PulseSchedule design(const ProtocolOptions& o) {
  switch (o.protocol) {
  case Protocol::p1: return design_protocol1(o.t_f, o.delta, o.beta, o.mode, o.formula);
  case Protocol::p2: return design_protocol2(o.t_f, o.delta);
  default: return design_chainwise(o.t_f, o.delta, o.epsilon, Direction::creation);
  }
}

/// Propagates rho0 through every segment of the schedule in turn and returns the
/// concatenated trajectory (segment boundaries appear once).
template <int N>
DensityTrajectory<N> propagate_schedule(const PulseSchedule& s, const DecayVector<N>& gamma,
                                        const DensityMatrix<N>& rho0, int samples_per_segment, double tol) {
  static_assert(N == 3 || N == 5);
  if (s.level_count() != N) throw DomainError("propagate_schedule: dimension does not match the schedule");
  DensityTrajectory<N> out;
  Matrix<N> rho = rho0.matrix();
  double prev_trace = rho0.trace();
  for (std::size_t k = 0; k < s.segments().size(); ++k) {
    const HamiltonianRule<N> h = [&] {
      if constexpr (N == 3) {
        return s.lambda_hamiltonian(k);
      } else {
        return s.m_hamiltonian(k);
      }
    }();
    const double dur = s.segments()[k].duration;
    auto seg = propagate_density<N>(h, gamma, DensityMatrix<N>(rho), TimeGrid(0.0, dur, samples_per_segment), tol);
    const double t0 = s.segment_start(k);
    for (std::size_t i = (k == 0 ? 0 : 1); i < seg.times.size(); ++i) {
      out.times.push_back(t0 + seg.times[i]);
      out.rhos.push_back(seg.rhos[i]);
    }
    out.stats.accepted += seg.stats.accepted;
    out.stats.rejected += seg.stats.rejected;
    out.stats.rhs_evals += seg.stats.rhs_evals;
    out.max_trace_increase = std::max({out.max_trace_increase, seg.max_trace_increase,
                                       seg.trace(0) - prev_trace});
    rho = seg.rhos.back();
    // Re-Hermitize the hand-off state; drift is at rounding level.
    rho = (0.5 * (rho + rho.adjoint())).eval();
    prev_trace = seg.trace(seg.times.size() - 1);
  }
  return out;
}

/// Target level of a one-way transfer: |g2> for Lambda, |g3> for M.
inline int target_level(Scheme s) { return s == Scheme::lambda3 ? 2 : 4; }

struct ScenarioOptions {
  ProtocolOptions protocol;
  std::vector<double> decays;
  std::optional<double> roundtrip_hold; // set for creation + hold + detection
  double tol = kDefaultTol;
  int samples_per_segment = 801;
};

struct ScenarioResult {
  PulseSchedule schedule;
  std::vector<double> times;
  std::vector<std::vector<double>> populations; // [sample][level]
  std::vector<double> trace;
  double efficiency = 0.0;                         // target population at the end of the forward leg
  std::optional<double> roundtrip_efficiency;      // |g1> population at the end of the round trip
  double peak_excited = 0.0;                       // max over samples of rho_22 (and rho_44)
  double peak_intermediate = 0.0;                  // max rho_33 on M schedules, 0 otherwise
  double max_trace_increase = 0.0;
  int target = 0;
  IntegratorStats stats;
};

namespace detail {

template <int N>
ScenarioResult scenario_impl(const PulseSchedule& schedule, const ScenarioOptions& o) {
  const auto gamma = DecayVector<N>::from(o.decays);
  const auto traj =
      propagate_schedule<N>(schedule, gamma, DensityMatrix<N>::basis(0), o.samples_per_segment, o.tol);
  ScenarioResult r{schedule, traj.times, {}, {}, 0.0, std::nullopt, 0.0, 0.0, traj.max_trace_increase,
                   target_level(schedule.scheme()), traj.stats};
  r.populations.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> p(N);
    for (int j = 0; j < N; ++j) p[static_cast<std::size_t>(j)] = traj.population(j, k);
    r.peak_excited = std::max(r.peak_excited, p[1]);
    if constexpr (N == 5) {
      r.peak_excited = std::max(r.peak_excited, p[3]);
      r.peak_intermediate = std::max(r.peak_intermediate, p[2]);
    }
    r.populations.push_back(std::move(p));
    r.trace.push_back(traj.trace(k));
  }
  const double t_forward = schedule.segments().front().duration;
  r.efficiency = population(traj, r.target, t_forward);
  if (o.roundtrip_hold) r.roundtrip_efficiency = traj.population(0, traj.times.size() - 1);
  return r;
}

} // namespace detail

inline ScenarioResult run_scenario(const ScenarioOptions& o) {
  PulseSchedule leg = design(o.protocol);
  PulseSchedule schedule = o.roundtrip_hold ? build_roundtrip(leg, *o.roundtrip_hold) : leg;
  if (schedule.scheme() == Scheme::lambda3) return detail::scenario_impl<3>(schedule, o);
  return detail::scenario_impl<5>(schedule, o);
}

enum class Metric { peak_amplitude, efficiency };

inline const char* to_string(Metric m) { return m == Metric::peak_amplitude ? "peak_amplitude" : "efficiency"; }

struct SweepSpec {
  Protocol protocol = Protocol::p2;
  AxisRange t_f{1.0, 6.0, 41};
  AxisRange delta{1000.0 * kPi, 5000.0 * kPi, 41};
  std::vector<double> decays;
  double beta = kPi / 1.99;
  double epsilon = 0.03;
  DeltaTwoMode mode = DeltaTwoMode::dropped();
  DeltaTwoFormula formula = DeltaTwoFormula::invariant;
  double tol = kDefaultTol;
  int threads = 0; // 0: CHAINWISE_STA_THREADS or hardware parallelism

  ProtocolOptions at(double t_f_value, double delta_value) const {
    return {protocol, t_f_value, delta_value, beta, epsilon, mode, formula};
  }
};

struct CellFailure {
  int row = 0; // t_f index
  int col = 0; // Delta index
  std::string message;
};

struct GridMapMeta {
  Protocol protocol = Protocol::p2;
  Metric metric = Metric::efficiency;
  std::vector<double> decays;
  double tol = kDefaultTol;
  double beta = 0.0;
  double epsilon = 0.0;
  DeltaTwoMode mode;
  DeltaTwoFormula formula = DeltaTwoFormula::invariant;
  std::vector<CellFailure> sentinels;
  std::optional<std::string> timestamp;
};

/// Values on the (t_f, Delta) grid; rows follow t_f, columns follow Delta.
struct GridMap {
  std::vector<double> t_f_axis;
  std::vector<double> delta_axis;
  std::vector<double> cells;
  GridMapMeta meta;

  double at(std::size_t row, std::size_t col) const { return cells.at(row * delta_axis.size() + col); }
  std::size_t rows() const { return t_f_axis.size(); }
  std::size_t cols() const { return delta_axis.size(); }
};

/// Worker count: explicit request, else CHAINWISE_STA_THREADS, else hardware parallelism.
inline int sweep_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CHAINWISE_STA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

template <class CellFn>
GridMap run_grid(const SweepSpec& spec, Metric metric, CellFn&& cell) {
  spec.t_f.validate("t_f");
  spec.delta.validate("Delta");
  GridMap map;
  map.t_f_axis = spec.t_f.values();
  map.delta_axis = spec.delta.values();
  map.meta = {spec.protocol, metric, spec.decays, spec.tol, spec.beta, spec.epsilon, spec.mode, spec.formula, {}, {}};
  const std::size_t rows = map.t_f_axis.size();
  const std::size_t cols = map.delta_axis.size();
  const std::size_t total = rows * cols;
  map.cells.assign(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const std::size_t i = idx / cols;
      const std::size_t j = idx % cols;
      try {
        map.cells[idx] = cell(spec.at(map.t_f_axis[i], map.delta_axis[j]));
      } catch (const std::exception& e) {
        errors[idx] = e.what();
      }
    }
  };
  const int n = std::min<int>(sweep_threads(spec.threads), static_cast<int>(total));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!errors[idx].empty()) {
      map.meta.sentinels.push_back(
          {static_cast<int>(idx / cols), static_cast<int>(idx % cols), std::move(errors[idx])});
    }
  }
  return map;
}

} // namespace detail

/// Peak of the first channel (omega for Lambda, omega1 = omega4 for M) per cell.
inline GridMap sweep_peak_amplitude(const SweepSpec& spec) {
  return detail::run_grid(spec, Metric::peak_amplitude,
                          [](const ProtocolOptions& o) { return design(o).peak_amplitude(); });
}

/// Final target population from |g1> per cell under the sweep decays.
inline GridMap sweep_efficiency(const SweepSpec& spec) {
  const int n = spec.protocol == Protocol::chainwise ? 5 : 3;
  if (spec.decays.size() != static_cast<std::size_t>(n)) {
    throw DomainError("sweep_efficiency: expected " + std::to_string(n) + " decay rates");
  }
  return detail::run_grid(spec, Metric::efficiency, [&spec](const ProtocolOptions& o) {
    const PulseSchedule s = design(o);
    if (s.scheme() == Scheme::lambda3) {
      const auto tr = propagate_schedule<3>(s, DecayVector<3>::from(spec.decays), DensityMatrix<3>::basis(0), 2,
                                            spec.tol);
      return tr.population(2, tr.times.size() - 1);
    }
    const auto tr =
        propagate_schedule<5>(s, DecayVector<5>::from(spec.decays), DensityMatrix<5>::basis(0), 2, spec.tol);
    return tr.population(4, tr.times.size() - 1);
  });
}

} // namespace chainsta
