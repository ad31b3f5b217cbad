// SPDX-License-Identifier: Apache-2.0
#pragma once

// chainsta command-line front end.
//
//   chainsta design   --protocol p1 --tf 4 --delta 1.8pi_GHz --beta pi/1.99
//   chainsta simulate --preset rb2_m --tf 8 --delta 1.27pi_GHz
//   chainsta roundtrip --preset rb2_lambda_p2 --hold 0.1
//   chainsta sweep    --protocol p2 --tf 1:6:41 --delta 1pi_GHz:5pi_GHz:41 --metric efficiency
//   chainsta presets
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chainsta/cli/config.hpp>
#include <chainsta/io.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace chainsta::cli {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

struct Flags {
  std::optional<std::string> command, config, preset, protocol, t_f, delta, beta, epsilon, gamma, hold, metric,
      delta_two, clamp_limit, formula, direction, out;
  std::optional<double> tol;
  std::optional<int> samples, series_samples, threads;
  bool stamp = false;
};

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline RunConfig resolve(const Flags& f) {
  RunConfig c;
  json file;
  if (f.config) file = load_json_file(*f.config);
  if (f.preset) {
    apply_preset(c, find_preset(*f.preset));
    if (file.is_object()) file.erase("preset");
  }
  if (f.config) apply_json(c, file);
  if (f.command) c.command = parse_command(*f.command);
  else if (!f.config || !file.contains("command")) throw ConfigError("command", "no command given");
  if (f.protocol) c.protocol = parse_protocol(*f.protocol);
  if (f.t_f) set_t_f(c, *f.t_f);
  if (f.delta) set_delta(c, *f.delta);
  if (f.beta) c.beta = units::parse_angle(*f.beta, "beta");
  if (f.epsilon) c.epsilon = units::parse_angle(*f.epsilon, "epsilon");
  if (f.clamp_limit) c.delta_two.limit = units::parse_frequency(*f.clamp_limit, "clamp_limit");
  if (f.delta_two) set_delta_two(c, *f.delta_two);
  if (f.formula) set_formula(c, *f.formula);
  if (f.direction) set_direction(c, *f.direction);
  if (f.gamma) c.decays = parse_decays(*f.gamma);
  if (f.hold) c.hold = units::parse_time(*f.hold, "hold");
  if (f.metric) set_metric(c, *f.metric);
  if (f.tol) c.tol = *f.tol;
  if (f.samples) c.samples = *f.samples;
  if (f.series_samples) c.series_samples = *f.series_samples;
  if (f.threads) c.threads = *f.threads;
  if (f.stamp) c.timestamp = true;
  if (f.out) c.out = *f.out;
  if (c.decays.empty()) c.decays = default_preset_for(c.protocol).decays;
  if (c.direction == Direction::detection && c.command != Command::design) {
    throw ConfigError("direction", "detection direction is only available to the design command");
  }
  c.validate();
  return c;
}

inline PulseSchedule design_for(const RunConfig& c) {
  if (c.protocol == Protocol::chainwise) return design_chainwise(c.t_f, c.delta, c.epsilon, c.direction);
  return design(c.protocol_options());
}

inline json manifest(const RunConfig& c, const std::vector<std::string>& files) {
  json j;
  j["tool"] = "chainsta";
  j["version"] = kVersion;
  j["command"] = to_string(c.command);
  j["config"] = to_json(c);
  j["units"] = {{"time", "us"}, {"frequency", "rad/us"}};
  j["integrator"] = {{"method", "dopri5"}, {"rtol", c.tol}, {"atol", c.tol * 1e-2}};
  if (c.preset) {
    const auto& p = find_preset(*c.preset);
    j["preset"] = {{"name", p.name}, {"note", p.note}};
  }
  j["files"] = files;
  if (c.timestamp) j["timestamp"] = utc_now();
  return j;
}

inline std::string fmt(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline int list_presets(std::ostream& out) {
  for (const auto& p : presets()) {
    out << p.name << ": protocol=" << to_string(p.protocol) << " t_f=" << fmt(p.t_f) << "us delta="
        << units::format_frequency(p.delta, units::FrequencyStyle::pi_GHz) << " decays=";
    for (std::size_t k = 0; k < p.decays.size(); ++k) out << (k ? "," : "") << fmt(p.decays[k]);
    out << "  # " << p.note << '\n';
  }
  return 0;
}

inline std::string execute(const RunConfig& c) {
  namespace fs = std::filesystem;
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create output directory '" + c.out + "': " + ec.message());
  auto path = [&](const char* name) { return (dir / name).string(); };
  std::vector<std::string> files;
  std::ostringstream line;

  switch (c.command) {
  case Command::design: {
    const PulseSchedule s = design_for(c);
    write_schedule_csv(s, path("schedule.csv"), c.samples);
    files.push_back("schedule.csv");
    line << "design " << to_string(c.protocol) << ": peak " << s.channel_names().front() << " = "
         << fmt(s.peak_amplitude()) << " rad/us over t_f = " << fmt(c.t_f) << " us";
    break;
  }
  case Command::simulate:
  case Command::roundtrip: {
    ScenarioOptions o;
    o.protocol = c.protocol_options();
    o.decays = c.decays;
    if (c.command == Command::roundtrip) o.roundtrip_hold = c.hold;
    o.tol = c.tol;
    o.samples_per_segment = c.series_samples;
    const ScenarioResult r = run_scenario(o);
    write_schedule_csv(r.schedule, path("schedule.csv"), c.samples);
    write_file(path("timeseries.csv"), [&](std::ostream& os) { write_timeseries_csv(r, os); });
    write_json_file(path("summary.json"), scenario_summary(r));
    files.insert(files.end(), {"schedule.csv", "timeseries.csv", "summary.json"});
    const std::string rho = "rho_" + std::to_string(r.target + 1) + std::to_string(r.target + 1);
    if (r.roundtrip_efficiency) {
      line << "roundtrip " << to_string(c.protocol) << ": one-way " << rho << " = " << fmt(r.efficiency)
           << ", final rho_11 = " << fmt(*r.roundtrip_efficiency) << " (hold " << fmt(c.hold) << " us)";
    } else {
      line << "simulate " << to_string(c.protocol) << ": final " << rho << " = " << fmt(r.efficiency)
           << ", peak excited = " << fmt(r.peak_excited) << ", final trace = " << fmt(r.trace.back());
    }
    break;
  }
  case Command::sweep: {
    SweepSpec spec;
    spec.protocol = c.protocol;
    spec.t_f = *c.t_f_range;
    spec.delta = *c.delta_range;
    spec.decays = c.decays;
    spec.beta = c.beta;
    spec.epsilon = c.epsilon;
    spec.mode = c.delta_two;
    spec.formula = c.delta_two_formula;
    spec.tol = c.tol;
    spec.threads = c.threads;
    GridMap m = c.metric == Metric::efficiency ? sweep_efficiency(spec) : sweep_peak_amplitude(spec);
    if (c.timestamp) m.meta.timestamp = utc_now();
    write_file(path("gridmap.csv"), [&](std::ostream& os) { write_gridmap_csv(m, os); });
    write_json_file(path("gridmap.json"), gridmap_metadata(m));
    files.insert(files.end(), {"gridmap.csv", "gridmap.json"});
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : m.cells) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    line << "sweep " << to_string(c.protocol) << ' ' << to_string(c.metric) << ": " << m.rows() << "x" << m.cols()
         << " cells, range [" << fmt(lo) << ", " << fmt(hi) << "], " << m.meta.sentinels.size() << " failed";
    break;
  }
  default: break;
  }
  write_json_file(path("config.json"), to_json(c));
  files.push_back("config.json");
  files.push_back("manifest.json");
  write_json_file(path("manifest.json"), manifest(c, files));
  return line.str();
}

} // namespace detail

/// Runs one command and returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Chainwise shortcut-to-adiabaticity pulse design and simulation"};
  app.set_version_flag("--version", kVersion);
  detail::Flags f;
  app.add_option("command", f.command, "design | simulate | roundtrip | sweep | presets");
  app.add_option("--config", f.config, "JSON config file (flags override it)");
  app.add_option("--preset", f.preset, "named parameter set (see 'presets')");
  app.add_option("--protocol", f.protocol, "p1 | p2 | chainwise");
  app.add_option("--tf", f.t_f, "duration in us, or min:max:count for sweeps");
  app.add_option("--delta", f.delta, "single-photon detuning, e.g. 1.8pi_GHz, or min:max:count");
  app.add_option("--beta", f.beta, "protocol 1 phase, e.g. pi/1.99");
  app.add_option("--epsilon", f.epsilon, "chainwise boundary angle");
  app.add_option("--gamma", f.gamma, "comma-separated decay rates, e.g. 2pi_x0.72_kHz,2pi_x12_MHz,2pi_x0.4_kHz");
  app.add_option("--hold", f.hold, "round-trip hold in us");
  app.add_option("--metric", f.metric, "efficiency | peak");
  app.add_option("--delta-two", f.delta_two, "dropped | clamped");
  app.add_option("--clamp-limit", f.clamp_limit, "clamp for the protocol 1 two-photon detuning");
  app.add_option("--delta-two-formula", f.formula, "invariant | negated | printed_ratio");
  app.add_option("--direction", f.direction, "creation | detection (chainwise design)");
  app.add_option("--tol", f.tol, "integrator relative tolerance");
  app.add_option("--samples", f.samples, "schedule CSV samples per segment");
  app.add_option("--series-samples", f.series_samples, "time-series samples per segment");
  app.add_option("--threads", f.threads, "sweep workers (0: CHAINWISE_STA_THREADS or all cores)");
  app.add_option("--out", f.out, "output directory");
  app.add_flag("--stamp", f.stamp, "record a wall-clock timestamp in metadata");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (f.command && *f.command == "presets") return detail::list_presets(out);
    const RunConfig c = detail::resolve(f);
    if (c.command == Command::presets) return detail::list_presets(out);
    out << detail::execute(c) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

} // namespace chainsta::cli
