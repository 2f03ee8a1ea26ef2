#include "qrc/error.hpp"

namespace qrc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NumericOverflow: return "numeric-overflow";
    case ErrorCode::IntegrationDiverged: return "integration-diverged";
    case ErrorCode::EmptyTrajectory: return "empty-trajectory";
    case ErrorCode::DegenerateScaler: return "degenerate-scaler";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::ForecastDiverged: return "forecast-diverged";
    case ErrorCode::TangentDegenerate: return "tangent-degenerate";
    case ErrorCode::NumericIntegrity: return "numeric-integrity";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace qrc
