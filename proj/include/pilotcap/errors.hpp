#pragma once

#include <stdexcept>
#include <string>

namespace pilotcap {

/// Argument outside the mathematical domain of an operation (negative energy,
/// nonpositive SNR, NaN input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration of a numerical routine (quadrature order, bracket).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A resource allocation that violates the problem constraints, e.g. pilots
/// that consume the whole block energy.
class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Formula not supported for the given parameters (singular closed form).
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical routine failed to reach its tolerance. Carries the best estimate
/// available when it gave up.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

}  // namespace pilotcap
