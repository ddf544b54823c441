#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levy_spde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside its mathematical domain (alpha, scale, t <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Request would exceed addressable resources (cell counts, evaluation budgets).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A callable produced a non-finite value where a finite one is required.
class NumericalDomainError : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for the given kernel (e.g. pointwise wave kernel in d >= 3).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Existence theory says the requested object is undefined for this configuration.
class RefusedError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure did not reach its tolerance. Carries the best estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound,
                std::vector<double> diagnostics = {})
      : Error(what),
        estimate_(estimate),
        error_bound_(error_bound),
        diagnostics_(std::move(diagnostics)) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }
  const std::vector<double>& diagnostics() const noexcept { return diagnostics_; }

 private:
  double estimate_;
  double error_bound_;
  std::vector<double> diagnostics_;
};

}  // namespace levy_spde
