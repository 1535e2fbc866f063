#pragma once

#include <stdexcept>
#include <string>

namespace eulerblow {

/// Argument outside the mathematical domain of an operation (negative density, r <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration: bad dimension, violated parameter invariant, unknown config key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The explicit update produced a negative or non-finite density.
class PositivityFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eulerblow
