#pragma once

#include <stdexcept>
#include <string>

namespace relstoch {

/// Violated operation precondition (bad argument combination, empty input).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |phi| vanished at an evaluation point, so the phase S is undefined there.
class SingularNode : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// dS/dt >= 0 at a point: drift, diffusion and proper-time rate are undefined.
class NonAdmissiblePoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested proper time exceeds what a path accumulated over the horizon.
class OutOfHorizon : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Explicit scheme time step exceeds its stability bound.
class CflViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A test function does not vanish on the quadrature box boundary.
class SupportViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN or overflow produced during integration.
class NumericalBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relstoch
