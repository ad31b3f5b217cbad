// SPDX-License-Identifier: Apache-2.0
#pragma once

// File formats for grid maps and scenario time series.

#include <chainsta/protocols.hpp>
#include <chainsta/sweeps.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

namespace chainsta {

using json = nlohmann::ordered_json;

inline json to_json(const DeltaTwoMode& m) {
  json j;
  j["kind"] = m.is_dropped() ? "dropped" : "exact_clamped";
  if (!m.is_dropped()) j["limit"] = m.limit;
  return j;
}

/// CSV matrix: first row is the Delta axis (rad/us), first column the t_f axis (us).
/// Failed cells are written as "nan".
inline void write_gridmap_csv(const GridMap& m, std::ostream& os) {
  os << "t_f_us\\delta_rad_per_us";
  for (double d : m.delta_axis) os << ',' << detail::fmt_double(d);
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << detail::fmt_double(m.t_f_axis[i]);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m.at(i, j);
      os << ',' << (std::isnan(v) ? std::string("nan") : detail::fmt_double(v));
    }
    os << '\n';
  }
}

inline json gridmap_metadata(const GridMap& m) {
  json j;
  j["protocol"] = to_string(m.meta.protocol);
  j["metric"] = to_string(m.meta.metric);
  j["units"] = m.meta.metric == Metric::efficiency ? "fraction" : "rad/us";
  j["rows"] = "t_f_us";
  j["cols"] = "delta_rad_per_us";
  j["shape"] = {m.rows(), m.cols()};
  j["decays_rad_per_us"] = m.meta.decays;
  j["tolerance"] = m.meta.tol;
  if (m.meta.protocol == Protocol::p1) {
    j["beta"] = m.meta.beta;
    j["delta_two_mode"] = to_json(m.meta.mode);
    j["delta_two_formula"] = to_string(m.meta.formula);
  }
  if (m.meta.protocol == Protocol::chainwise) j["epsilon"] = m.meta.epsilon;
  json s = json::array();
  for (const auto& f : m.meta.sentinels) {
    s.push_back({{"row", f.row}, {"col", f.col}, {"t_f", m.t_f_axis[static_cast<std::size_t>(f.row)]},
                 {"delta", m.delta_axis[static_cast<std::size_t>(f.col)]}, {"error", f.message}});
  }
  j["sentinels"] = s;
  if (m.meta.timestamp) j["timestamp"] = *m.meta.timestamp;
  return j;
}

/// CSV time series: t_us, pop_1..pop_n, trace.
inline void write_timeseries_csv(const ScenarioResult& r, std::ostream& os) {
  const std::size_t n = r.populations.empty() ? 0 : r.populations.front().size();
  os << "t_us";
  for (std::size_t j = 1; j <= n; ++j) os << ",pop_" << j;
  os << ",trace\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    os << detail::fmt_double(r.times[k]);
    for (double p : r.populations[k]) os << ',' << detail::fmt_double(p);
    os << ',' << detail::fmt_double(r.trace[k]) << '\n';
  }
}

inline json scenario_summary(const ScenarioResult& r) {
  json j;
  j["scheme"] = to_string(r.schedule.scheme());
  j["levels"] = r.schedule.level_count();
  j["target_level"] = r.target + 1;
  j["duration_us"] = r.schedule.duration();
  json segs = json::array();
  for (std::size_t k = 0; k < r.schedule.segments().size(); ++k) {
    const auto& s = r.schedule.segments()[k];
    segs.push_back({{"kind", to_string(s.kind)}, {"start_us", r.schedule.segment_start(k)}, {"duration_us", s.duration}});
  }
  j["segments"] = segs;
  j["efficiency"] = r.efficiency;
  if (r.roundtrip_efficiency) j["roundtrip_efficiency"] = *r.roundtrip_efficiency;
  j["peak_excited_population"] = r.peak_excited;
  if (r.schedule.scheme() == Scheme::m5) j["peak_intermediate_population"] = r.peak_intermediate;
  j["final_trace"] = r.trace.empty() ? 0.0 : r.trace.back();
  j["peak_amplitude_rad_per_us"] = r.schedule.peak_amplitude();
  j["integrator"] = {{"accepted_steps", r.stats.accepted}, {"rejected_steps", r.stats.rejected}};
  return j;
}

template <class Writer>
void write_file(const std::string& path, Writer&& w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  w(f);
  if (!f) throw DomainError("failed writing " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

} // namespace chainsta
