#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lorentz_ot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A geodesic or shooting request between events that are not causally related.
class InfeasiblePair : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge; carries the final residual.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// State outside the closed domain of the fiber Lagrangian.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Weights are not representable over the requested denominator.
/// `suggested_denominator()` is 0 when no denominator up to the search bound works.
class RationalizationError : public Error {
 public:
  RationalizationError(const std::string& what, std::int64_t suggested)
      : Error(what), suggested_(suggested) {}
  std::int64_t suggested_denominator() const { return suggested_; }

 private:
  std::int64_t suggested_;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace lorentz_ot
