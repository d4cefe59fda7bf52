#pragma once

#include <stdexcept>
#include <string>

namespace cmcspec {

// Input or H^g membership failure. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical resolution failure (winding, rank, quadrature). CLI exit code 3.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal consistency failure; always a bug. CLI exit code 4.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kDefaultTol = 1e-9;

}  // namespace cmcspec
