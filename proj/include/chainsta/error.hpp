// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace chainsta {

/// Invalid argument or violated precondition (bad parameters, wrong shapes).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Integration or evaluation failure: non-Hermitian input, step-size underflow.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// User configuration problem (unknown key, malformed unit string, missing preset).
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

} // namespace chainsta
