#pragma once

#include <stdexcept>
#include <string>

namespace mehybrid {

// Invalid arguments and points outside the random domain are reported with
// std::invalid_argument and std::domain_error. Everything below signals a
// numerical failure while evaluating a model or solving a subproblem.

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration for a transition-layer root did not converge.
class RootFailure : public NumericalFailure {
 public:
  RootFailure(const std::string& what, double last_a, double last_z)
      : NumericalFailure(what), last_a_(last_a), last_z_(last_z) {}
  double last_amplitude() const noexcept { return last_a_; }
  double last_position() const noexcept { return last_z_; }

 private:
  double last_a_;
  double last_z_;
};

/// Time integration produced a non-finite state.
class IntegrationFailure : public NumericalFailure {
 public:
  IntegrationFailure(const std::string& what, double time)
      : NumericalFailure(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// An exact model threw while being evaluated at a collocation node.
class ModelEvaluationError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// The Galerkin machinery only handles right-hand sides that are at most
/// quadratic in (state variables, random fields).
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mehybrid
