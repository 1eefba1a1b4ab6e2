#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lfmimo {

/// Raised when an input violates a documented invariant. `field()` names the
/// offending parameter using a dotted path such as "traffic.d_max".
class ValidationError : public std::invalid_argument {
public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// The delay constraint cannot be met within the resource caps.
class InfeasibleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A bracketing solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Zero channel vectors or codeword sets that admit no zero-forcing beam.
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lfmimo
