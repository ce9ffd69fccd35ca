#pragma once

#include <stdexcept>
#include <string>

namespace anonplan {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a flat intermediate table would exceed the configured entry budget.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace anonplan
