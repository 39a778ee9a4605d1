#pragma once

#include <stdexcept>
#include <string>

namespace mlcd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, labels, options).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numeric precondition does not hold (empty layer, enumeration bound, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlcd
