#pragma once

#include <stdexcept>
#include <string>

namespace qmotor {

/// Invalid or inconsistent input parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but could not meet its accuracy or stability contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmotor
