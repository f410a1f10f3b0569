#pragma once

#include <stdexcept>
#include <string>

namespace halfspace {

// Common base so callers can catch anything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (dimension mismatch, out-of-range
// parameter, ...).
struct InvalidArgumentError : Error {
  using Error::Error;
};

// A numeric routine failed to reach its tolerance (e.g. adaptive quadrature
// hit its subdivision cap, or an integrand produced NaN).
struct NumericFailure : Error {
  using Error::Error;
};

// A size limit would be exceeded (polynomial degree, feature count, ...).
struct CapacityError : Error {
  using Error::Error;
};

// A construction whose output carries a correctness certificate failed its own
// certificate check; the message carries the measured error.
struct ConstructionFailure : Error {
  using Error::Error;
};

// Requested accuracy is below what double precision can deliver for this
// construction (detected before returning garbage).
struct PrecisionFailure : Error {
  using Error::Error;
};

// An iterative optimizer exhausted its budget without meeting its stopping
// rule; the message carries the achieved objective.
struct OptimizationFailure : Error {
  using Error::Error;
};

// An input sample is degenerate for the requested operation (empty band,
// all-zero average, ...).
struct DegenerateSampleError : Error {
  using Error::Error;
};

// A draw/label budget was exhausted before the requested sample was collected;
// the message carries the counts.
struct BudgetError : Error {
  using Error::Error;
};

}  // namespace halfspace
