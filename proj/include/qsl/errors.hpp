#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

/// Base of every error raised by the library. Each derived type maps to one
/// failure class; the CLI turns them into stable exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A thermodynamic input violates a declared bound (q outside [-1,1], beta <= 0, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// z*q*exp(-beta*eps_min) >= 1: the occupation denominator vanishes or flips sign.
class PoleViolation : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (log of a non-positive number, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A series or integral that does not converge for the given arguments.
class DivergentInput : public Error {
public:
  using Error::Error;
};

/// No truncation below the hard work cap certifies the requested tolerance.
class TailBoundFailure : public Error {
public:
  using Error::Error;
};

/// Running error bounds show fewer significant digits than required.
class PrecisionExhausted : public Error {
public:
  PrecisionExhausted(const std::string& what, int failing_index)
      : Error(what), failing_index_(failing_index) {}
  int failing_index() const noexcept { return failing_index_; }

private:
  int failing_index_;
};

/// Least-squares fit impossible: too few residuals above the precision floor.
class DegenerateFit : public Error {
public:
  using Error::Error;
};

}  // namespace qsl
