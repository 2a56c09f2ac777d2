#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geomag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double error_estimate, double worst_frequency)
      : Error(what), error_estimate_(error_estimate), worst_frequency_(worst_frequency) {}
  double error_estimate() const noexcept { return error_estimate_; }
  /// Midpoint (rad/s) of the subinterval with the largest remaining error.
  double worst_frequency() const noexcept { return worst_frequency_; }

 private:
  double error_estimate_;
  double worst_frequency_;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class CalibrationFailure : public Error {
 public:
  CalibrationFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class DegenerateSlope : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Raised when more than one field candidate is consistent with a measurement.
/// The candidates are kept so callers can still report them.
class Unresolvable : public Error {
 public:
  Unresolvable(const std::string& what, std::vector<double> candidates)
      : Error(what), candidates_(std::move(candidates)) {}
  const std::vector<double>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<double> candidates_;
};

class AdiabaticityViolation : public Error {
 public:
  AdiabaticityViolation(const std::string& what, double scale_factor, double adiabaticity)
      : Error(what), scale_factor_(scale_factor), adiabaticity_(adiabaticity) {}
  double scale_factor() const noexcept { return scale_factor_; }
  double adiabaticity() const noexcept { return adiabaticity_; }

 private:
  double scale_factor_;
  double adiabaticity_;
};

}  // namespace geomag
