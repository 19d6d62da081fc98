#ifndef SEPCA_ERROR_HPP
#define SEPCA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sepca {

/// Invalid configuration or arguments supplied by a caller (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File-system or format failure; the message carries path and position (exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed to produce a result within its limits (exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sepca

#endif  // SEPCA_ERROR_HPP
