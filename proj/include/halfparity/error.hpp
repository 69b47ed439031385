#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace halfparity {

/// Invalid argument or configuration (violated precondition).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigensolver failure or another numerical breakdown outside the integrator.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by a single sse/sme step; the trajectory driver rethrows it as an
/// IntegrationError with indices attached.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stochastic step failed (norm divergence, positivity loss). Carries the
/// trajectory and step index so ensemble drivers can report them.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, std::size_t trajectory, std::size_t step)
      : std::runtime_error(what + " (trajectory " + std::to_string(trajectory) + ", step " +
                           std::to_string(step) + ")"),
        trajectory_(trajectory),
        step_(step) {}

  std::size_t trajectory() const noexcept { return trajectory_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t trajectory_;
  std::size_t step_;
};

}  // namespace halfparity
