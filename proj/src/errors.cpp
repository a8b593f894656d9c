#include "sbd/errors.hpp"

namespace sbd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularCirculant: return "SingularCirculant";
    case ErrorCode::OddLattice: return "OddLattice";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::SingularConstraintGram: return "SingularConstraintGram";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::MaskNotKronecker: return "MaskNotKronecker";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::IndefiniteY: return "IndefiniteY";
    case ErrorCode::IndefiniteS: return "IndefiniteS";
    case ErrorCode::StaleWorkspace: return "StaleWorkspace";
    case ErrorCode::NonFiniteTrajectory: return "NonFiniteTrajectory";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::IndefiniteDense: return "IndefiniteDense";
    case ErrorCode::DegenerateTrace: return "DegenerateTrace";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sbd
