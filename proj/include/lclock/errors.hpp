#pragma once

#include <stdexcept>
#include <string>

namespace lclock {

// Bad user input: config files, CLI values, out-of-range parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The math went somewhere it should not have (non-finite state, failed
// convergence). Distinct from ConfigError so the CLI can map the two to
// different exit codes.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lclock
