#pragma once

#include <stdexcept>
#include <string>

namespace lcktk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data: bad indices, duplicate simplices, inconsistent covers.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition does not hold (disconnected complex, non-closed form, ...).
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// An operation left the materialized region of a truncated covering.
class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace lcktk
