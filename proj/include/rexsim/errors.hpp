#pragma once

#include <stdexcept>
#include <string>

namespace rexsim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (T <= 0, n < 1, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A record or argument violates its declared invariants.
class ValidationError : public Error
{
  public:
    using Error::Error;
};

/// Measured inputs are mutually inconsistent beyond the tolerance band.
class InconsistencyError : public Error
{
  public:
    using Error::Error;
};

/// Too few data points for an estimator.
class InsufficientDataError : public Error
{
  public:
    using Error::Error;
};

/// A fit could not produce a meaningful answer.
class FitError : public Error
{
  public:
    using Error::Error;
};

/// Integrator or other numerical failure.
class NumericError : public Error
{
  public:
    using Error::Error;
};

} // namespace rexsim
