#pragma once

#include <stdexcept>
#include <string>

namespace atmd {

/// Invalid input: bad parameters, malformed files, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A numerical procedure failed (singular solve, divergence, no convergence).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

/// The design parameters lead to an undefined quantity (e.g. a transfer
/// function zero with a vanishing denominator).
class InfeasibleDesign : public std::runtime_error {
 public:
  explicit InfeasibleDesign(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace atmd
