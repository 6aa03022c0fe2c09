#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wigchar {

enum class ErrorKind {
  NonPositiveDensity,
  UnboundedA,
  MomentFailure,
  OutOfRange,
  QuadratureFailure,
  InvalidStep,
  InvalidConfig,
  SolveFailure,
  DimensionMismatch,
  DivisionHazard,
  ODEStepFailure,
  DegenerateFit,
  EmptySample,
  IOFailure,
};

/// Stable, human-readable name of an error kind ("UnboundedA", ...).
std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wigchar
