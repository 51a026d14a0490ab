#pragma once

#include <stdexcept>
#include <string>

namespace mflab {

/// Precondition violation. The message names the offending parameter.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values, unreachable tolerances, exhausted step budgets.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mflab
