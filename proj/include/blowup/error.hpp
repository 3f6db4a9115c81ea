#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A violated precondition or invalid configuration. The message names the
/// violated condition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during a computation.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace detail
}  // namespace blowup
