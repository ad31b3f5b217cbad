// SPDX-License-Identifier: Apache-2.0
#pragma once

// Inverse-engineered laboratory pulse schedules. Each protocol fixes the
// auxiliary angles of an invariant of the effective model, reads off the
// effective couplings that realize them, and maps those back onto the
// physical Rabi frequencies of the full Lambda or M chain.

#include <chainsta/invariants.hpp>
#include <chainsta/qcore.hpp>
#include <chainsta/schemes.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace chainsta {

enum class Scheme { lambda3, m5 };
enum class Protocol { p1, p2, chainwise };

inline const char* to_string(Scheme s) { return s == Scheme::lambda3 ? "lambda3" : "m5"; }
inline const char* to_string(Protocol p) {
  switch (p) {
  case Protocol::p1: return "p1";
  case Protocol::p2: return "p2";
  default: return "chainwise";
  }
}

inline constexpr double kDefaultClampLimit = 200.0 * kPi;

/// How the protocol-1 two-photon detuning is realized.
struct DeltaTwoMode {
  enum class Kind { exact_clamped, dropped };
  Kind kind = Kind::dropped;
  double limit = kDefaultClampLimit;

  static DeltaTwoMode dropped() { return {}; }
  static DeltaTwoMode exact_clamped(double limit = kDefaultClampLimit) {
    if (!(limit > 0.0)) throw DomainError("DeltaTwoMode: clamp limit must be > 0");
    return {Kind::exact_clamped, limit};
  }
  bool is_dropped() const { return kind == Kind::dropped; }
};

/// Closed form used for the protocol-1 two-photon detuning.
///  invariant:     +(pi/t_f) cot(theta) cot(beta)   exact invariant of the effective model
///  negated:       -(pi/t_f) cot(theta) cot(beta)
///  printed_ratio: -(pi/t_f) cot(theta) / cot(beta)
enum class DeltaTwoFormula { invariant, negated, printed_ratio };

inline const char* to_string(DeltaTwoFormula f) {
  switch (f) {
  case DeltaTwoFormula::invariant: return "invariant";
  case DeltaTwoFormula::negated: return "negated";
  default: return "printed_ratio";
  }
}

/// Channel values at one instant. Lambda schedules use omega[0] for both pump and Stokes.
struct PulseSample {
  std::array<double, 4> omega{};
  double delta_two = 0.0;
};

/// Constant-amplitude protocol: theta(t) = pi t / t_f, constant beta.
struct Protocol1Leg {
  double t_f = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  DeltaTwoMode mode;
  DeltaTwoFormula formula = DeltaTwoFormula::invariant;
  double omega = 0.0;

  double theta(double t) const { return kPi * t / t_f; }

  /// Unclamped two-photon detuning of the chosen formula (infinite at the ends).
  double delta_two_exact(double t) const {
    const double cb = std::cos(beta);
    if (std::abs(cb) < 1e-15 && formula != DeltaTwoFormula::printed_ratio) return 0.0;
    const double th = theta(t);
    const double cot_theta = std::cos(th) / std::sin(th);
    const double cot_beta = cb / std::sin(beta);
    switch (formula) {
    case DeltaTwoFormula::invariant: return (kPi / t_f) * cot_theta * cot_beta;
    case DeltaTwoFormula::negated: return -(kPi / t_f) * cot_theta * cot_beta;
    default: return -(kPi / t_f) * cot_theta / cot_beta;
    }
  }

  double delta_two(double t) const {
    if (mode.is_dropped()) return 0.0;
    const double d = delta_two_exact(t);
    if (std::isnan(d)) return 0.0;
    return std::clamp(d, -mode.limit, mode.limit);
  }

  PulseSample sample(double t) const {
    PulseSample s;
    s.omega[0] = s.omega[1] = omega;
    s.delta_two = delta_two(t);
    return s;
  }

  TwoLevelAux aux(double omega0 = 1.0) const {
    return {[tf = t_f](double t) { return kPi * t / tf; }, constant_channel(beta), omega0};
  }
};

/// Cubic-theta protocol with beta = pi/2: omega(t) = sqrt(2 Delta theta'(t)).
struct Protocol2Leg {
  double t_f = 0.0;
  double delta = 0.0;

  double theta(double t) const {
    const double s = t / t_f;
    return kPi * s * s * (3.0 - 2.0 * s);
  }
  double theta_dot(double t) const {
    const double s = t / t_f;
    return 6.0 * kPi * s * (1.0 - s) / t_f;
  }
  double omega(double t) const { return std::sqrt(std::max(0.0, 2.0 * delta * theta_dot(t))); }

  PulseSample sample(double t) const {
    PulseSample s;
    s.omega[0] = s.omega[1] = omega(t);
    return s;
  }

  TwoLevelAux aux(double omega0 = 1.0) const {
    return {[leg = *this](double t) { return leg.theta(t); }, constant_channel(kPi / 2), omega0};
  }
};

/// Five-level chainwise protocol built on the polynomial three-level invariant.
struct ChainwiseLeg {
  ThreeLevelAux aux;
  double delta = 0.0;

  /// Effective couplings realizing the invariant.
  std::pair<double, double> effective(double t) const {
    const double c = aux.chi(t);
    const double cd = aux.chi_dot(t);
    const double v = aux.vartheta(t);
    const double vd = aux.vartheta_dot(t);
    const double cot_chi = std::cos(c) / std::sin(c);
    return {2.0 * (vd * cot_chi * std::sin(v) + cd * std::cos(v)),
            2.0 * (vd * cot_chi * std::cos(v) - cd * std::sin(v))};
  }

  PulseSample sample(double t) const {
    const auto [e1, e2] = effective(t);
    const double s = e1 * e1 + e2 * e2;
    PulseSample out;
    if (s == 0.0) return out; // limit of the fourth-root construction
    const double d2 = 4.0 * delta * delta;
    const double f = std::pow(d2 / s, 0.25);
    out.omega[1] = e1 * f;
    out.omega[2] = e2 * f;
    out.omega[0] = out.omega[3] = std::pow(d2 * s, 0.25);
    return out;
  }
};

/// The lab pulses reduce to the designed effective chain with both couplings negated,
/// which is the designed chain conjugated by this matrix. Eigenstates of the lab
/// effective model are gauge() * phi.
inline Matrix<3> chainwise_gauge() {
  Matrix<3> u = Matrix<3>::Identity();
  u(1, 1) = -1.0;
  return u;
}

/// All channels off.
struct HoldLeg {
  PulseSample sample(double) const { return {}; }
};

/// Channels tabulated on a time grid and interpolated by piecewise cubic Hermite
/// with three-point finite-difference slopes.
class TabulatedLeg {
public:
  TabulatedLeg() = default;
  TabulatedLeg(std::vector<double> t, std::vector<PulseSample> values) : t_(std::move(t)), v_(std::move(values)) {
    if (t_.size() < 2 || t_.size() != v_.size()) throw DomainError("TabulatedLeg: need >= 2 matching samples");
    for (std::size_t k = 1; k < t_.size(); ++k) {
      if (!(t_[k] > t_[k - 1])) throw DomainError("TabulatedLeg: times must be strictly increasing");
    }
    const std::size_t n = t_.size();
    slopes_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (int c = 0; c < 5; ++c) slopes_[k][static_cast<std::size_t>(c)] = slope(k, c);
    }
  }

  double start() const { return t_.front(); }
  double end() const { return t_.back(); }

  PulseSample sample(double t) const {
    t = std::clamp(t, t_.front(), t_.back());
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    if (k >= t_.size() - 1) k = t_.size() - 2;
    const double h = t_[k + 1] - t_[k];
    const double s = (t - t_[k]) / h;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    PulseSample out;
    for (int c = 0; c < 5; ++c) {
      const auto cc = static_cast<std::size_t>(c);
      const double y = h00 * value(k, c) + h10 * h * slopes_[k][cc] + h01 * value(k + 1, c) +
                       h11 * h * slopes_[k + 1][cc];
      if (c < 4) {
        out.omega[cc] = y;
      } else {
        out.delta_two = y;
      }
    }
    return out;
  }

private:
  double value(std::size_t k, int c) const {
    return c < 4 ? v_[k].omega[static_cast<std::size_t>(c)] : v_[k].delta_two;
  }
  double slope(std::size_t k, int c) const {
    const std::size_t n = t_.size();
    if (k == 0) return (value(1, c) - value(0, c)) / (t_[1] - t_[0]);
    if (k == n - 1) return (value(n - 1, c) - value(n - 2, c)) / (t_[n - 1] - t_[n - 2]);
    const double h0 = t_[k] - t_[k - 1];
    const double h1 = t_[k + 1] - t_[k];
    const double d0 = (value(k, c) - value(k - 1, c)) / h0;
    const double d1 = (value(k + 1, c) - value(k, c)) / h1;
    return (h1 * d0 + h0 * d1) / (h0 + h1);
  }

  std::vector<double> t_;
  std::vector<PulseSample> v_;
  std::vector<std::array<double, 5>> slopes_;
};

using Leg = std::variant<Protocol1Leg, Protocol2Leg, ChainwiseLeg, HoldLeg, TabulatedLeg>;

enum class SegmentKind { forward, hold, backward };

inline const char* to_string(SegmentKind k) {
  switch (k) {
  case SegmentKind::forward: return "forward";
  case SegmentKind::hold: return "hold";
  default: return "backward";
  }
}

struct Segment {
  SegmentKind kind = SegmentKind::forward;
  double duration = 0.0;
  Leg leg;

  /// Channel values at time t measured from the start of this segment.
  PulseSample sample(double local_t) const {
    return std::visit([local_t](const auto& l) { return l.sample(local_t); }, leg);
  }
};

/// A designed control: ordered segments over [0, duration()] for one scheme.
class PulseSchedule {
public:
  PulseSchedule(Scheme scheme, double delta_single, std::vector<Segment> segments)
      : scheme_(scheme), delta_single_(delta_single), segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("PulseSchedule: no segments");
    double t = 0.0;
    for (const auto& s : segments_) {
      if (!(s.duration > 0.0)) throw DomainError("PulseSchedule: segment durations must be > 0");
      starts_.push_back(t);
      t += s.duration;
    }
    total_ = t;
  }

  Scheme scheme() const noexcept { return scheme_; }
  double delta_single() const noexcept { return delta_single_; }
  double duration() const noexcept { return total_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double segment_start(std::size_t k) const { return starts_.at(k); }
  int level_count() const { return scheme_ == Scheme::lambda3 ? 3 : 5; }

  std::vector<std::string> channel_names() const {
    if (scheme_ == Scheme::lambda3) return {"omega"};
    return {"omega1", "omega2", "omega3", "omega4"};
  }

  std::size_t segment_index(double t) const {
    if (t < 0.0 || t > total_) {
      std::ostringstream os;
      os << "PulseSchedule: time " << t << " outside [0, " << total_ << "]";
      throw DomainError(os.str());
    }
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    return static_cast<std::size_t>(it - starts_.begin()) - 1;
  }

  PulseSample sample(double t) const {
    const std::size_t k = segment_index(t);
    return segments_[k].sample(t - starts_[k]);
  }

  /// Lab-frame Lambda parameters of segment k on local time.
  LambdaParams lambda_params(std::size_t k = 0) const {
    require(Scheme::lambda3);
    const Segment& seg = segments_.at(k);
    LambdaParams p;
    auto omega = [seg](double t) { return seg.sample(t).omega[0]; };
    p.omega1 = omega;
    p.omega2 = omega;
    p.delta_two = [seg](double t) { return seg.sample(t).delta_two; };
    p.delta_single = delta_single_;
    p.duration = seg.duration;
    return p;
  }

  /// Lab-frame M parameters of segment k on local time.
  MParams m_params(std::size_t k = 0) const {
    require(Scheme::m5);
    const Segment& seg = segments_.at(k);
    MParams p;
    for (std::size_t j = 0; j < 4; ++j) {
      p.omega[j] = [seg, j](double t) { return seg.sample(t).omega[j]; };
    }
    p.delta_single = delta_single_;
    p.duration = seg.duration;
    p.stark_balanced = true;
    return p;
  }

  HamiltonianRule<3> lambda_hamiltonian(std::size_t k = 0) const { return build_lambda(lambda_params(k)); }
  HamiltonianRule<5> m_hamiltonian(std::size_t k = 0) const { return build_m(m_params(k)); }

  /// Largest |channel| over the schedule, sampled at n points per segment.
  double peak_amplitude(int samples_per_segment = 4001, int channel = 0) const {
    double peak = 0.0;
    for (const auto& s : segments_) {
      const TimeGrid g(0.0, s.duration, samples_per_segment);
      for (double t : g.samples()) {
        peak = std::max(peak, std::abs(s.sample(t).omega[static_cast<std::size_t>(channel)]));
      }
    }
    return peak;
  }

private:
  void require(Scheme s) const {
    if (scheme_ != s) {
      throw DomainError(std::string("PulseSchedule: operation requires a ") + to_string(s) + " schedule");
    }
  }

  Scheme scheme_;
  double delta_single_;
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

/// Constant Rabi frequency sqrt(2 Delta pi / (t_f sin beta)) with theta = pi t / t_f.
inline PulseSchedule design_protocol1(double t_f, double delta_single, double beta,
                                      DeltaTwoMode mode = DeltaTwoMode::dropped(),
                                      DeltaTwoFormula formula = DeltaTwoFormula::invariant) {
  if (!(t_f > 0.0)) throw DomainError("design_protocol1: t_f must be > 0");
  if (delta_single == 0.0) throw DomainError("design_protocol1: Delta must be non-zero");
  const double sb = std::sin(beta);
  if (std::abs(sb) < 1e-12) throw DomainError("design_protocol1: sin(beta) must be non-zero");
  const double radicand = 2.0 * delta_single * kPi / (t_f * sb);
  if (radicand < 0.0) {
    throw DomainError("design_protocol1: Delta * sin(beta) < 0 gives a negative radicand");
  }
  if (formula == DeltaTwoFormula::printed_ratio && std::abs(std::cos(beta)) < 1e-15) {
    throw DomainError("design_protocol1: printed_ratio formula is singular at cos(beta) = 0");
  }
  Protocol1Leg leg{t_f, delta_single, beta, mode, formula, std::sqrt(radicand)};
  return PulseSchedule(Scheme::lambda3, delta_single, {Segment{SegmentKind::forward, t_f, leg}});
}

/// omega(t) = sqrt(2 Delta theta'(t)) with theta = 3 pi s^2 - 2 pi s^3, s = t / t_f.
inline PulseSchedule design_protocol2(double t_f, double delta_single) {
  if (!(t_f > 0.0)) throw DomainError("design_protocol2: t_f must be > 0");
  if (!(delta_single > 0.0)) throw DomainError("design_protocol2: Delta must be > 0 (radicand 2 Delta theta')");
  return PulseSchedule(Scheme::lambda3, delta_single,
                       {Segment{SegmentKind::forward, t_f, Protocol2Leg{t_f, delta_single}}});
}

inline PulseSchedule design_chainwise(double t_f, double delta_single, double epsilon,
                                      Direction direction = Direction::creation) {
  if (!(t_f > 0.0)) throw DomainError("design_chainwise: t_f must be > 0");
  if (!(delta_single > 0.0)) throw DomainError("design_chainwise: Delta must be > 0");
  ChainwiseLeg leg{solve_aux_polynomials(t_f, epsilon, direction), delta_single};
  const auto kind = direction == Direction::creation ? SegmentKind::forward : SegmentKind::backward;
  return PulseSchedule(Scheme::m5, delta_single, {Segment{kind, t_f, leg}});
}

/// Forward leg, hold with all fields off, and the return leg. Lambda schedules
/// replay the same pulses; M schedules reverse the vartheta boundary values.
inline PulseSchedule build_roundtrip(const PulseSchedule& leg, double hold_duration) {
  if (!(hold_duration >= 0.0)) throw DomainError("build_roundtrip: hold duration must be >= 0");
  if (leg.segments().size() != 1 || leg.segments().front().kind != SegmentKind::forward) {
    throw DomainError("build_roundtrip: input must be a single forward segment");
  }
  const Segment& fwd = leg.segments().front();
  std::vector<Segment> segs{fwd};
  if (hold_duration > 0.0) segs.push_back(Segment{SegmentKind::hold, hold_duration, HoldLeg{}});
  if (leg.scheme() == Scheme::lambda3) {
    segs.push_back(Segment{SegmentKind::backward, fwd.duration, fwd.leg});
  } else {
    const auto* cw = std::get_if<ChainwiseLeg>(&fwd.leg);
    if (!cw) throw DomainError("build_roundtrip: m5 round trips need a chainwise leg");
    ChainwiseLeg back{solve_aux_polynomials(cw->aux.t_f, cw->aux.epsilon, Direction::detection), cw->delta};
    segs.push_back(Segment{SegmentKind::backward, fwd.duration, back});
  }
  return PulseSchedule(leg.scheme(), leg.delta_single(), std::move(segs));
}

/// Effective two-level model of a single-segment Lambda schedule.
inline EffTwoLevel effective_two_level(const PulseSchedule& s, std::size_t segment = 0) {
  return reduce_lambda(s.lambda_params(segment));
}

/// Effective three-level model of a single-segment M schedule.
inline EffThreeLevel effective_three_level(const PulseSchedule& s, std::size_t segment = 0) {
  return reduce_m(s.m_params(segment));
}

// ---------------------------------------------------------------------------
// CSV export / import: t_us, one column per channel (rad/us), delta_two.

inline constexpr int kDefaultSamplesPerLeg = 2000;

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace detail

inline void write_schedule_csv(const PulseSchedule& s, std::ostream& os,
                               int samples_per_leg = kDefaultSamplesPerLeg) {
  if (samples_per_leg < 2) throw DomainError("write_schedule_csv: samples_per_leg must be >= 2");
  const auto names = s.channel_names();
  os << "t_us";
  for (const auto& n : names) os << ',' << n;
  os << ",delta_two\n";
  const int channels = static_cast<int>(names.size());
  for (std::size_t k = 0; k < s.segments().size(); ++k) {
    const Segment& seg = s.segments()[k];
    const TimeGrid g(0.0, seg.duration, samples_per_leg);
    for (int i = (k == 0 ? 0 : 1); i < g.size(); ++i) {
      const double lt = g.at(i);
      const PulseSample p = seg.sample(lt);
      os << detail::fmt_double(s.segment_start(k) + lt);
      for (int c = 0; c < channels; ++c) os << ',' << detail::fmt_double(p.omega[static_cast<std::size_t>(c)]);
      os << ',' << detail::fmt_double(p.delta_two) << '\n';
    }
  }
}

inline void write_schedule_csv(const PulseSchedule& s, const std::string& path,
                               int samples_per_leg = kDefaultSamplesPerLeg) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  write_schedule_csv(s, f, samples_per_leg);
}

/// Reads a schedule CSV back as a single tabulated forward segment.
inline PulseSchedule read_schedule_csv(std::istream& is, double delta_single) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("read_schedule_csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  Scheme scheme;
  if (header == std::vector<std::string>{"t_us", "omega", "delta_two"}) {
    scheme = Scheme::lambda3;
  } else if (header == std::vector<std::string>{"t_us", "omega1", "omega2", "omega3", "omega4", "delta_two"}) {
    scheme = Scheme::m5;
  } else {
    throw DomainError("read_schedule_csv: unrecognized header '" + line + "'");
  }
  std::vector<double> times;
  std::vector<PulseSample> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != header.size()) throw DomainError("read_schedule_csv: ragged row '" + line + "'");
    PulseSample p;
    if (scheme == Scheme::lambda3) {
      p.omega[0] = p.omega[1] = row[1];
      p.delta_two = row[2];
    } else {
      for (std::size_t j = 0; j < 4; ++j) p.omega[j] = row[j + 1];
      p.delta_two = row[5];
    }
    times.push_back(row[0]);
    values.push_back(p);
  }
  if (times.size() < 2) throw DomainError("read_schedule_csv: need at least two rows");
  const double t0 = times.front();
  for (double& t : times) t -= t0;
  const double dur = times.back();
  return PulseSchedule(scheme, delta_single,
                       {Segment{SegmentKind::forward, dur, TabulatedLeg(std::move(times), std::move(values))}});
}

} // namespace chainsta
