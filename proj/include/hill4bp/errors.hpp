#pragma once

#include <stdexcept>
#include <string>

namespace hill4bp {

/// Argument outside the mathematical domain of an operation (e.g. mu > 1/2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at (or numerically at) the collision singularity r = 0.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested object does not exist for these parameters (L3/L4 at mu = 0).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stereographic projection evaluated at the North pole xi0 = 1.
class NorthPoleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conserved quantity drifted beyond the integrator's contract.
class DriftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hill4bp
