#pragma once

#include <stdexcept>
#include <string>

namespace ehrenfest {

// Base of every error raised by the library. The CLI maps subclasses to
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data: a Cayley table violating a group axiom, a bad
// element name, a generator inside the subgroup.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Model parameter out of its admissible range (e.g. mp outside [0, 1]).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A size guard refused the computation; the message names the alternative.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

// Floating point evaluation drifted outside its tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// An internal invariant did not hold (non-Gelfand or corrupted input).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace ehrenfest
