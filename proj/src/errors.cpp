#include "concentra/errors.hpp"

namespace concentra {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ResonantMode: return "ResonantMode";
    case ErrorKind::PointsTooCloseToBoundary: return "PointsTooCloseToBoundary";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::SeriesNotConverging: return "SeriesNotConverging";
    case ErrorKind::StepOutOfRange: return "StepOutOfRange";
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AsymmetricRow: return "AsymmetricRow";
    case ErrorKind::StencilLeavesDomain: return "StencilLeavesDomain";
    case ErrorKind::NoPositiveStart: return "NoPositiveStart";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::WrongRegime: return "WrongRegime";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::InvalidConfiguration: return "InvalidConfiguration";
    case ErrorKind::FitIllConditioned: return "FitIllConditioned";
  }
  return "Unknown";
}

}  // namespace concentra
