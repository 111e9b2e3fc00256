#pragma once

#include <stdexcept>
#include <string>

namespace qreduce {

/// Base class for every failure raised by the library. The CLI maps
/// UsageError to exit status 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input from the caller: unknown names, out-of-range knobs, empty sets.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the domain of a parametrization.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vanishing tangent vector on a curve.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Degenerate parametrization or metric (r_u x r_v = 0, EG - F^2 <= 0, pole).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Layer coordinates no longer valid (|q| * |k| >= 1, non-positive metric).
class BreakdownError : public Error {
 public:
  using Error::Error;
};

/// Constraint matrix singular where a second class system was expected.
class NotSecondClassError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver did not converge within its iteration cap.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace qreduce
