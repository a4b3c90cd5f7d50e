#pragma once

#include <stdexcept>
#include <string>

namespace erl {

// Every failure the core raises derives from Error; the C API maps the
// concrete type onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or parameters outside an operation's domain.
class UsageError : public Error {
 public:
  using Error::Error;
};

// The request is well-formed but exceeds a size or enumeration budget.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// An operation's mathematical precondition does not hold for the input
// (e.g. a family with no (2,k)-colouring handed to the partition engine).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Internal invariant breach. Carries a state dump in the message.
class EngineFault : public Error {
 public:
  using Error::Error;
};

}  // namespace erl
