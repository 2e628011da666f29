#include "gss/error.hpp"

namespace gss {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "SyntaxError";
    case ErrorKind::unknown_identifier: return "UnknownIdentifier";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::non_smooth_function: return "NonSmoothFunction";
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::regularity: return "RegularityError";
    case ErrorKind::indefinite: return "IndefiniteError";
    case ErrorKind::degenerate_plane: return "DegeneratePlaneError";
    case ErrorKind::projection_diverged: return "ProjectionDiverged";
    case ErrorKind::zero_covector: return "ZeroCovector";
    case ErrorKind::step_size_underflow: return "StepSizeUnderflow";
    case ErrorKind::max_steps_exceeded: return "MaxStepsExceeded";
    case ErrorKind::on_binding: return "OnBindingError";
    case ErrorKind::not_on_binding: return "NotOnBinding";
    case ErrorKind::non_positive_epsilon: return "NonPositiveEpsilon";
    case ErrorKind::non_convergent: return "NonConvergent";
    case ErrorKind::quadrature_failure: return "QuadratureFailure";
    case ErrorKind::pole_point: return "PolePoint";
    case ErrorKind::unsupported_surface: return "UnsupportedSurface";
    case ErrorKind::config: return "ConfigError";
  }
  return "Error";
}

}  // namespace gss
