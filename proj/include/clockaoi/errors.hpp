#pragma once

#include <stdexcept>
#include <string>

namespace clockaoi {

/// A parameter set that does not describe a valid system (for example periods
/// sharing a common divisor). The CLI maps this to exit status 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the relative approximation error has no finite bound because
/// the AoI sequence is identically zero.
class UnboundedError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

}  // namespace clockaoi
