#pragma once

#include <stdexcept>
#include <string>

namespace normspace {

/// Bad input: dimension mismatch, malformed JSON, out-of-range arguments.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The request exceeds a documented enumeration bound.
struct InfeasibleScale : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stated precondition (e.g. pairwise ball compatibility) does not hold.
struct PreconditionViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed. Indicates a bug, never bad input.
struct DefectError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace normspace
