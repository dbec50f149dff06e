#pragma once

#include <stdexcept>
#include <string>

namespace rbsde {

/// Invalid configuration or precondition violation (bad grid, claim below
/// floor, unknown config key, ...). The CLI maps this to exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runtime numerical failure (degenerate regression, overflow in the
/// backward recursion, ...). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rbsde
