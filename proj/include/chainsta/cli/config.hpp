// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chainsta/cli/units.hpp>
#include <chainsta/io.hpp>
#include <chainsta/sweeps.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chainsta::cli {

enum class Command { design, simulate, sweep, roundtrip, presets };

inline const char* to_string(Command c) {
  switch (c) {
  case Command::design: return "design";
  case Command::simulate: return "simulate";
  case Command::sweep: return "sweep";
  case Command::roundtrip: return "roundtrip";
  default: return "presets";
  }
}

inline Command parse_command(const std::string& s) {
  if (s == "design") return Command::design;
  if (s == "simulate") return Command::simulate;
  if (s == "sweep") return Command::sweep;
  if (s == "roundtrip") return Command::roundtrip;
  if (s == "presets") return Command::presets;
  throw ConfigError("command", "unknown command '" + s + "'");
}

inline Protocol parse_protocol(const std::string& s) {
  if (s == "p1") return Protocol::p1;
  if (s == "p2") return Protocol::p2;
  if (s == "chainwise" || s == "m5") return Protocol::chainwise;
  throw ConfigError("protocol", "unknown protocol '" + s + "' (expected p1, p2, chainwise)");
}

/// Named parameter sets for 87Rb2 (decays, detuning, duration, protocol knobs).
struct Preset {
  std::string name;
  Protocol protocol;
  std::vector<double> decays;
  double t_f;
  double delta;
  double beta;
  double epsilon;
  std::string note;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    const double two_pi = 2.0 * kPi;
    const std::vector<double> lambda_decays{two_pi * 0.72e-3, two_pi * 12.0, two_pi * 0.4e-3};
    return std::vector<Preset>{
        {"rb2_lambda", Protocol::p1, lambda_decays, 4.0, 1800.0 * kPi, kPi / 1.99, 0.03,
         "Lambda scheme, protocol 1 design point (Omega = 30pi MHz)"},
        {"rb2_lambda_p2", Protocol::p2, lambda_decays, 4.0, 1200.0 * kPi, kPi / 1.99, 0.03,
         "Lambda scheme, protocol 2 design point (peak Omega = 30pi MHz)"},
        {"rb2_m", Protocol::chainwise, {0.01, 30.0, 0.01, 30.0, 0.0}, 8.0, 1270.0 * kPi, kPi / 1.99, 0.03,
         "M scheme; decay rates read as plain rad/us (0.01 and 30)"},
        {"rb2_m_2pi", Protocol::chainwise, {two_pi * 0.01, two_pi * 30.0, two_pi * 0.01, two_pi * 30.0, 0.0}, 8.0,
         1270.0 * kPi, kPi / 1.99, 0.03, "M scheme; decay rates read with a 2pi factor (2pi x 0.01, 2pi x 30)"},
    };
  }();
  return all;
}

inline const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("preset", "no preset named '" + name + "'");
}

/// Default decays when neither a preset nor explicit rates are given.
inline const Preset& default_preset_for(Protocol p) {
  return find_preset(p == Protocol::chainwise ? "rb2_m" : "rb2_lambda");
}

/// Fully resolved run parameters. Angular frequencies in rad/us, times in us.
struct RunConfig {
  Command command = Command::simulate;
  std::optional<std::string> preset;
  Protocol protocol = Protocol::p2;
  double t_f = 4.0;
  double delta = 1200.0 * kPi;
  std::optional<AxisRange> t_f_range;
  std::optional<AxisRange> delta_range;
  double beta = kPi / 1.99;
  double epsilon = 0.03;
  DeltaTwoMode delta_two = DeltaTwoMode::dropped();
  DeltaTwoFormula delta_two_formula = DeltaTwoFormula::invariant;
  Direction direction = Direction::creation;
  std::vector<double> decays;
  double hold = 0.1;
  Metric metric = Metric::efficiency;
  double tol = kDefaultTol;
  int samples = kDefaultSamplesPerLeg;
  int series_samples = 801;
  int threads = 0;
  bool timestamp = false;
  std::string out = "out"; // not serialized: output location is not a run parameter

  ProtocolOptions protocol_options() const {
    return {protocol, t_f, delta, beta, epsilon, delta_two, delta_two_formula};
  }

  void validate() const {
    auto positive = [](double v, const char* key) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be a positive number");
    };
    positive(t_f, "t_f");
    if (protocol != Protocol::p1) positive(delta, "delta");
    if (protocol == Protocol::p1 && delta == 0.0) throw ConfigError("delta", "must be non-zero");
    if (!(tol >= 1e-12 && tol <= 1e-4)) throw ConfigError("tol", "must lie in [1e-12, 1e-4]");
    if (hold < 0.0) throw ConfigError("hold", "must be >= 0");
    if (samples < 2) throw ConfigError("samples", "must be >= 2");
    if (series_samples < 2) throw ConfigError("series_samples", "must be >= 2");
    if (threads < 0) throw ConfigError("threads", "must be >= 0");
    if (protocol == Protocol::chainwise && !(epsilon >= kMinEpsilon && epsilon < kPi / 4)) {
      throw ConfigError("epsilon", "must lie in [1e-3, pi/4)");
    }
    const std::size_t n = protocol == Protocol::chainwise ? 5 : 3;
    if (decays.size() != n) {
      throw ConfigError("decays", "expected " + std::to_string(n) + " rates for protocol " + to_string(protocol));
    }
    for (double g : decays) {
      if (!(g >= 0.0)) throw ConfigError("decays", "rates must be >= 0");
    }
    if (command == Command::sweep) {
      if (!t_f_range) throw ConfigError("t_f", "sweep needs a range min:max:count");
      if (!delta_range) throw ConfigError("delta", "sweep needs a range min:max:count");
      try {
        t_f_range->validate("t_f");
        delta_range->validate("delta");
      } catch (const DomainError& e) {
        throw ConfigError("range", e.what());
      }
    }
  }
};

namespace detail {

inline std::string as_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    return chainsta::detail::fmt_double(v.get<double>());
  }
  throw ConfigError(key, "expected a number or unit string");
}

inline double json_frequency(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  return units::parse_frequency(as_text(v, key), key);
}

inline double json_time(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  return units::parse_time(as_text(v, key), key);
}

inline double json_angle(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  return units::parse_angle(as_text(v, key), key);
}

template <class Parse>
AxisRange parse_range_text(const std::string& text, const std::string& key, Parse&& parse) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw ConfigError(key, "expected range min:max:count");
  AxisRange r;
  r.min = parse(text.substr(0, a), key);
  r.max = parse(text.substr(a + 1, b - a - 1), key);
  const std::string count = text.substr(b + 1);
  try {
    std::size_t pos = 0;
    r.count = std::stoi(count, &pos);
    if (pos != count.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError(key, "malformed range count '" + count + "'");
  }
  return r;
}

} // namespace detail

/// Sets a scalar or range quantity from text ("4", "1:6:41", "1.8pi_GHz", "1pi_GHz:5pi_GHz:41").
inline void set_t_f(RunConfig& c, const std::string& text) {
  if (text.find(':') != std::string::npos) {
    c.t_f_range = detail::parse_range_text(text, "t_f", units::parse_time);
    c.t_f = c.t_f_range->min;
  } else {
    c.t_f = units::parse_time(text, "t_f");
    c.t_f_range.reset();
  }
}

inline void set_delta(RunConfig& c, const std::string& text) {
  if (text.find(':') != std::string::npos) {
    c.delta_range = detail::parse_range_text(text, "delta", units::parse_frequency);
    c.delta = c.delta_range->min;
  } else {
    c.delta = units::parse_frequency(text, "delta");
    c.delta_range.reset();
  }
}

inline std::vector<double> parse_decays(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(units::parse_frequency(item, "decays"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline void set_delta_two(RunConfig& c, const std::string& s) {
  if (s == "dropped") {
    c.delta_two = DeltaTwoMode::dropped();
  } else if (s == "clamped" || s == "exact_clamped") {
    c.delta_two = DeltaTwoMode::exact_clamped(c.delta_two.limit);
  } else {
    throw ConfigError("delta_two", "expected 'dropped' or 'clamped', got '" + s + "'");
  }
}

inline void set_formula(RunConfig& c, const std::string& s) {
  if (s == "invariant") {
    c.delta_two_formula = DeltaTwoFormula::invariant;
  } else if (s == "negated") {
    c.delta_two_formula = DeltaTwoFormula::negated;
  } else if (s == "printed_ratio") {
    c.delta_two_formula = DeltaTwoFormula::printed_ratio;
  } else {
    throw ConfigError("delta_two_formula", "expected invariant, negated or printed_ratio, got '" + s + "'");
  }
}

inline void set_direction(RunConfig& c, const std::string& s) {
  if (s == "creation") {
    c.direction = Direction::creation;
  } else if (s == "detection") {
    c.direction = Direction::detection;
  } else {
    throw ConfigError("direction", "expected creation or detection, got '" + s + "'");
  }
}

inline void set_metric(RunConfig& c, const std::string& s) {
  if (s == "efficiency") {
    c.metric = Metric::efficiency;
  } else if (s == "peak" || s == "peak_amplitude") {
    c.metric = Metric::peak_amplitude;
  } else {
    throw ConfigError("metric", "expected efficiency or peak, got '" + s + "'");
  }
}

inline void apply_preset(RunConfig& c, const Preset& p) {
  c.preset = p.name;
  c.protocol = p.protocol;
  c.decays = p.decays;
  c.t_f = p.t_f;
  c.delta = p.delta;
  c.beta = p.beta;
  c.epsilon = p.epsilon;
}

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{"command", "preset", "protocol", "t_f", "delta", "beta", "epsilon",
                                          "delta_two", "clamp_limit", "delta_two_formula", "direction", "decays",
                                          "hold", "metric", "tol", "samples", "series_samples", "threads",
                                          "timestamp"};
  return keys;
}

/// Applies the keys of a JSON config object on top of c. A "preset" key is applied first.
inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!config_keys().count(k)) throw ConfigError(k, "unknown config key");
  }
  try {
    if (j.contains("preset") && !j["preset"].is_null()) apply_preset(c, find_preset(j["preset"].get<std::string>()));
    for (const auto& [k, v] : j.items()) {
      if (k == "preset") continue;
      if (k == "command") {
        c.command = parse_command(v.get<std::string>());
      } else if (k == "protocol") {
        c.protocol = parse_protocol(v.get<std::string>());
      } else if (k == "t_f") {
        if (v.is_object()) {
          c.t_f_range = AxisRange{detail::json_time(v.at("min"), k), detail::json_time(v.at("max"), k),
                                  v.at("count").get<int>()};
          c.t_f = c.t_f_range->min;
        } else if (v.is_number()) {
          c.t_f = v.get<double>();
          c.t_f_range.reset();
        } else {
          set_t_f(c, detail::as_text(v, k));
        }
      } else if (k == "delta") {
        if (v.is_object()) {
          c.delta_range = AxisRange{detail::json_frequency(v.at("min"), k), detail::json_frequency(v.at("max"), k),
                                    v.at("count").get<int>()};
          c.delta = c.delta_range->min;
        } else if (v.is_number()) {
          c.delta = v.get<double>();
          c.delta_range.reset();
        } else {
          set_delta(c, detail::as_text(v, k));
        }
      } else if (k == "beta") {
        c.beta = detail::json_angle(v, k);
      } else if (k == "epsilon") {
        c.epsilon = detail::json_angle(v, k);
      } else if (k == "delta_two") {
        set_delta_two(c, v.get<std::string>());
      } else if (k == "clamp_limit") {
        c.delta_two.limit = detail::json_frequency(v, k);
      } else if (k == "delta_two_formula") {
        set_formula(c, v.get<std::string>());
      } else if (k == "direction") {
        set_direction(c, v.get<std::string>());
      } else if (k == "decays") {
        if (v.is_array()) {
          c.decays.clear();
          for (const auto& g : v) c.decays.push_back(detail::json_frequency(g, k));
        } else {
          c.decays = parse_decays(v.get<std::string>());
        }
      } else if (k == "hold") {
        c.hold = detail::json_time(v, k);
      } else if (k == "metric") {
        set_metric(c, v.get<std::string>());
      } else if (k == "tol") {
        c.tol = v.get<double>();
      } else if (k == "samples") {
        c.samples = v.get<int>();
      } else if (k == "series_samples") {
        c.series_samples = v.get<int>();
      } else if (k == "threads") {
        c.threads = v.get<int>();
      } else if (k == "timestamp") {
        c.timestamp = v.get<bool>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("malformed config value: ") + e.what());
  }
}

/// Serialized form of the resolved configuration; reloading it reproduces the run.
inline json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  if (c.preset) j["preset"] = *c.preset;
  j["protocol"] = to_string(c.protocol);
  if (c.t_f_range) {
    j["t_f"] = {{"min", c.t_f_range->min}, {"max", c.t_f_range->max}, {"count", c.t_f_range->count}};
  } else {
    j["t_f"] = c.t_f;
  }
  if (c.delta_range) {
    j["delta"] = {{"min", c.delta_range->min}, {"max", c.delta_range->max}, {"count", c.delta_range->count}};
  } else {
    j["delta"] = c.delta;
  }
  j["beta"] = c.beta;
  j["epsilon"] = c.epsilon;
  j["delta_two"] = c.delta_two.is_dropped() ? "dropped" : "clamped";
  j["clamp_limit"] = c.delta_two.limit;
  j["delta_two_formula"] = to_string(c.delta_two_formula);
  j["direction"] = to_string(c.direction);
  j["decays"] = c.decays;
  j["hold"] = c.hold;
  j["metric"] = to_string(c.metric);
  j["tol"] = c.tol;
  j["samples"] = c.samples;
  j["series_samples"] = c.series_samples;
  j["threads"] = c.threads;
  j["timestamp"] = c.timestamp;
  return j;
}

inline json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config", "invalid JSON in '" + path + "': " + e.what());
  }
}

} // namespace chainsta::cli
