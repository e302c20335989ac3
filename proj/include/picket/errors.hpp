#pragma once

#include <stdexcept>
#include <string>

namespace picket {

/// Bad input to an operation (out-of-range parameter, malformed data).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A modulus set violates one of the design constraints.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive verifier was asked to enumerate beyond its guard.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested bound carries no information (K <= alpha + 1, eps >= 1, ...).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV, JSON, binary files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace picket
