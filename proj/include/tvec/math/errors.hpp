#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tvec {

/// Raised when an integration or evaluation produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::vector<double> state,
               double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), state_(std::move(state)), time_(time) {}

  const std::vector<double>& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }

 private:
  std::vector<double> state_;
  double time_;
};

/// A matrix needed by the dynamics is numerically singular.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// linearize() was asked to expand around a point that is not an equilibrium.
class EquilibriumError : public std::runtime_error {
 public:
  EquilibriumError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace tvec
