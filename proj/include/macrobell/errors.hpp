#pragma once

#include <stdexcept>
#include <string>

namespace macrobell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an input was violated (bad size, sign, grid...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Cat basis requested at an amplitude where |+> and |-> coincide.
class DegenerateBasisError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Fock truncation dropped more probability than the tolerance allows.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int required_n_max)
      : Error(what), required_n_max_(required_n_max) {}

  int required_n_max() const noexcept { return required_n_max_; }

 private:
  int required_n_max_;
};

/// Inputs were valid but the computation could not produce a result
/// (no oscillation found, vanishing denominator, non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace macrobell
