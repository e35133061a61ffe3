#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace horosvm {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric invariant was violated (point outside the open ball, mu <= 0, ...).
struct InvariantError : Error {
  using Error::Error;
};

// Vector dimensions of two arguments do not agree.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Sphere geodesic requested between (numerically) antipodal endpoints.
struct AntipodalError : Error {
  using Error::Error;
};

// Objective returned NaN/Inf loss or gradient during optimization.
struct NonFiniteObjective : Error {
  using Error::Error;
};

struct EmptyDataset : Error {
  using Error::Error;
};

// Binary training requires both labels; OvR requires >= 2 classes.
struct SingleClassDataset : Error {
  using Error::Error;
};

// Dataset file is malformed; carries the 1-based line number.
struct ParseError : Error {
  ParseError(std::size_t line_no, const std::string& reason)
      : Error("parse error at line " + std::to_string(line_no) + ": " + reason),
        line(line_no) {}
  std::size_t line;
};

// A class has too few members for the requested split/fold configuration.
struct ClassTooSmall : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

// Balanced label flipping requested more flips than a class can supply.
struct InsufficientClassMembers : Error {
  using Error::Error;
};

// Convexity probe requires a sample away from the ball center.
struct DegeneratePoint : Error {
  using Error::Error;
};

}  // namespace horosvm
