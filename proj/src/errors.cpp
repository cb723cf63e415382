#include "vpbwave/errors.hpp"

namespace vpb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::no_solution: return "NoSolution";
    case ErrorKind::convergence: return "ConvergenceFailure";
    case ErrorKind::nonphysical_moments: return "NonphysicalMoments";
    case ErrorKind::not_microscopic: return "NotMicroscopic";
    case ErrorKind::positivity: return "PositivityViolation";
    case ErrorKind::stability: return "StabilityViolation";
    case ErrorKind::neutrality: return "NeutralityViolated";
    case ErrorKind::boundary_reached: return "BoundaryReached";
    case ErrorKind::nonpositive_series: return "NonPositiveSeries";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::validation: return "ValidationError";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

}  // namespace vpb
