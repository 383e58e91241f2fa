#pragma once

#include <stdexcept>
#include <string>

namespace sunada {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (cycle strings, fixture files, specs).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (element cap, retry budget, sample budget) was hit.
class LimitError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: step underflow, chart exit, singular frame, divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sunada
