#pragma once

#include <stdexcept>
#include <string>

namespace freeform {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the admissible domain (radius out of range, point outside the model, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A geometric object degenerated (singular metric, vanishing potential, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be self-adjoint with respect to the metric is not.
class AsymmetryError : public Error {
 public:
  using Error::Error;
};

/// Curvature vector outside the required Garding cone.
class ConeError : public Error {
 public:
  using Error::Error;
};

/// Boundary does not meet the ball boundary orthogonally.
class FreeBoundaryError : public Error {
 public:
  using Error::Error;
};

/// The contact constraints of a perturbed profile could not be enforced.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Value outside the attained range of a monotone function.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed or was rank deficient beyond the expected kernel.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Requested quantity is not supported for this input.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or shape document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace freeform
