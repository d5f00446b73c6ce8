#pragma once

#include <stdexcept>
#include <string>

namespace dethunt {

/// Base class of every error thrown by the library.
class HuntError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (e.g. s outside I).
class DomainError : public HuntError {
 public:
  using HuntError::HuntError;
};

/// A value lies outside the range of a generating path.
class RangeError : public HuntError {
 public:
  using HuntError::HuntError;
};

/// Bracketing or bisection could not produce an inverse within tolerance.
class SearchFailure : public HuntError {
 public:
  using HuntError::HuntError;
};

/// No forward room to take a right-hand difference quotient.
class DerivativeUndefined : public HuntError {
 public:
  using HuntError::HuntError;
};

/// A validated structure turned out to be internally inconsistent.
class StructuralIntegrityError : public HuntError {
 public:
  using HuntError::HuntError;
};

/// Operation only supports a subset of structures.
class UnsupportedRepresentation : public HuntError {
 public:
  using HuntError::HuntError;
};

/// A structure could not be serialized to the text format.
class EmitError : public HuntError {
 public:
  using HuntError::HuntError;
};

/// Malformed input data (tables, node files).
class FormatError : public HuntError {
 public:
  using HuntError::HuntError;
};

}  // namespace dethunt
