#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lydia {

/// Invalid objective name, parameter, step-size or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A trajectory produced a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Too few usable points for a regression.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contract cannot be evaluated for this input (e.g. no Lipschitz constant).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lydia
