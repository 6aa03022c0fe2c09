#include "wigchar/error.hpp"

namespace wigchar {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorKind::UnboundedA: return "UnboundedA";
    case ErrorKind::MomentFailure: return "MomentFailure";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::InvalidStep: return "InvalidStep";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::SolveFailure: return "SolveFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DivisionHazard: return "DivisionHazard";
    case ErrorKind::ODEStepFailure: return "ODEStepFailure";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::IOFailure: return "IOFailure";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace wigchar
