#pragma once

#include <stdexcept>
#include <string>

namespace loewner {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad matrix, bad interval, bad parameter.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument (or eigenvalue) lies outside the domain of a function.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// Grid points that coincide under the coalescence tolerance.
class DegeneratePoints : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

/// Common base for the iterative procedures that can run out of budget.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class QuadratureFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class LimitNotConverged : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class SolverNotConverged : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace loewner
