#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nevan {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad config, inconsistent dimensions, unknown check names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Floating point pipeline produced something it cannot recover from.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A mathematical identity the library relies on was contradicted.
/// Seeing one of these means a bug, never bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotMaximalRank : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class LinearlyDegenerate : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DegenerateMap : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotGeneralPosition : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class TooFewHyperplanes : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotOnFermat : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DoesNotOmit : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// f(C^p) lies inside the support of the divisor, so the pullback is undefined.
class IdenticallyZeroComposition : public PreconditionError {
 public:
  IdenticallyZeroComposition(std::size_t index, const std::string& what)
      : PreconditionError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class QuadratureFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateSlice : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace nevan
