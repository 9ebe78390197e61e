#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bbm {

// Invalid arguments and configurations are reported with std::invalid_argument.

// A run produced non-finite values or an integrator gave up.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf detected in the state after a time step.
class BlowUpError : public NumericalFailure {
 public:
  BlowUpError(std::size_t step, const std::string& where)
      : NumericalFailure("blow-up at step " + std::to_string(step) + " (" + where + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Adaptive integrator exceeded its step budget or step size underflowed.
class ConvergenceFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Too few usable points for a slope fit.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bbm
