#pragma once

#include <stdexcept>
#include <string>

namespace g2pinch {

/// Bad user input: malformed data, violated preconditions, unknown names.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two computation routes that must agree did not. Indicates a bug, not bad input.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace g2pinch
