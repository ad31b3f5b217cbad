// SPDX-License-Identifier: Apache-2.0
#pragma once

// Convenience unit strings for angular frequencies, angles and times.
//
//   "30pi_MHz"     -> 30 pi rad/us
//   "1.8pi_GHz"    -> 1800 pi rad/us
//   "2pi_x12_MHz"  -> 24 pi rad/us
//   "2pi_x0.72_kHz"-> 1.44e-3 pi rad/us
//   "12_MHz"       -> 12 rad/us (angular MHz)
//   "94.25"        -> 94.25 rad/us
// Angles: "pi/1.99", "0.5pi", "pi", "1.5707". Times: "4", "4us", "100ns".

#include <chainsta/error.hpp>
#include <chainsta/invariants.hpp>

#include <cstdio>
#include <regex>
#include <string>

namespace chainsta::units {

namespace detail {

inline double to_number(const std::string& s, const std::string& key, const std::string& whole) {
  if (s.empty()) return 1.0;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "malformed number '" + whole + "'");
  }
}

inline double unit_scale(const std::string& unit) {
  if (unit == "GHz") return 1000.0;
  if (unit == "MHz") return 1.0;
  return 1e-3; // kHz / KHz
}

inline std::string trim_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

} // namespace detail

/// Parses an angular frequency to rad/us.
inline double parse_frequency(const std::string& text, const std::string& key = "") {
  static const std::regex two_pi(R"(^([0-9.eE+-]*)pi_x([0-9.eE+-]+)_(GHz|MHz|kHz|KHz)$)");
  static const std::regex with_pi(R"(^([0-9.eE+-]*)pi_(GHz|MHz|kHz|KHz)$)");
  static const std::regex plain_unit(R"(^([0-9.eE+-]+)_(GHz|MHz|kHz|KHz)$)");
  std::smatch m;
  if (std::regex_match(text, m, two_pi)) {
    return detail::to_number(m[1], key, text) * kPi * detail::to_number(m[2], key, text) *
           detail::unit_scale(m[3]);
  }
  if (std::regex_match(text, m, with_pi)) {
    return detail::to_number(m[1], key, text) * kPi * detail::unit_scale(m[2]);
  }
  if (std::regex_match(text, m, plain_unit)) {
    return detail::to_number(m[1], key, text) * detail::unit_scale(m[2]);
  }
  if (text.empty()) throw ConfigError(key, "empty value");
  return detail::to_number(text, key, text);
}

/// Parses an angle in radians.
inline double parse_angle(const std::string& text, const std::string& key = "") {
  static const std::regex pi_expr(R"(^([0-9.eE+-]*)pi(/([0-9.eE+-]+))?$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_expr)) {
    double v = detail::to_number(m[1], key, text) * kPi;
    if (m[3].matched) {
      const double d = detail::to_number(m[3], key, text);
      if (d == 0.0) throw ConfigError(key, "division by zero in '" + text + "'");
      v /= d;
    }
    return v;
  }
  if (text.empty()) throw ConfigError(key, "empty value");
  return detail::to_number(text, key, text);
}

/// Parses a time to microseconds.
inline double parse_time(const std::string& text, const std::string& key = "") {
  static const std::regex with_unit(R"(^([0-9.eE+-]+)_?(us|ns|ms)$)");
  std::smatch m;
  if (std::regex_match(text, m, with_unit)) {
    const double v = detail::to_number(m[1], key, text);
    if (m[2] == "ns") return v * 1e-3;
    if (m[2] == "ms") return v * 1e3;
    return v;
  }
  if (text.empty()) throw ConfigError(key, "empty value");
  return detail::to_number(text, key, text);
}

enum class FrequencyStyle { rad_per_us, pi_MHz, pi_GHz, two_pi_MHz, two_pi_kHz };

/// Formats rad/us in the requested notation (15 significant digits in the coefficient).
inline std::string format_frequency(double rad_per_us, FrequencyStyle style) {
  switch (style) {
  case FrequencyStyle::rad_per_us: return detail::trim_number(rad_per_us);
  case FrequencyStyle::pi_MHz: return detail::trim_number(rad_per_us / kPi) + "pi_MHz";
  case FrequencyStyle::pi_GHz: return detail::trim_number(rad_per_us / (1000.0 * kPi)) + "pi_GHz";
  case FrequencyStyle::two_pi_MHz: return "2pi_x" + detail::trim_number(rad_per_us / (2.0 * kPi)) + "_MHz";
  default: return "2pi_x" + detail::trim_number(rad_per_us / (2e-3 * kPi)) + "_kHz";
  }
}

} // namespace chainsta::units
