#pragma once

#include <stdexcept>
#include <string>

namespace qpoincare {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (dimension mismatch, bad exponent, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix expected to be Hermitian is not, beyond tolerance.
class NotHermitianError : public Error {
 public:
  NotHermitianError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Density has an eigenvalue at or below the positivity threshold.
class SingularStateError : public Error {
 public:
  SingularStateError(const std::string& what, double lambda_min)
      : Error(what), lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

/// Complex power of a density would leave the double exponent range.
class OverflowGuardError : public Error {
 public:
  OverflowGuardError(const std::string& what, double exponent)
      : Error(what), exponent_(exponent) {}
  double exponent() const noexcept { return exponent_; }

 private:
  double exponent_;
};

/// Generator failed a detailed-balance requirement of the requested operation.
class DetailedBalanceError : public Error {
 public:
  DetailedBalanceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Kernel of a generator could not be separated from the rest of its spectrum.
class KernelAmbiguityError : public Error {
 public:
  KernelAmbiguityError(const std::string& what, double largest_zero, double smallest_nonzero)
      : Error(what), largest_zero_(largest_zero), smallest_nonzero_(smallest_nonzero) {}
  double largest_zero() const noexcept { return largest_zero_; }
  double smallest_nonzero() const noexcept { return smallest_nonzero_; }

 private:
  double largest_zero_;
  double smallest_nonzero_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpoincare
