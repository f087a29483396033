#pragma once

#include <stdexcept>
#include <string>

namespace ring_thermo {

// Quantum numbers or physical parameters outside their allowed range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An operation defined for one coupling variant was called with the other.
class VariantMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A direct sum did not meet its tail bound before the hard term cap.
class TruncationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The truncated Euler-Maclaurin partition function went non-positive.
class NonPositiveResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ring_thermo
