#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrc {

enum class ErrorCode {
  InvalidArgument,
  NumericOverflow,
  IntegrationDiverged,
  EmptyTrajectory,
  DegenerateScaler,
  SingularSystem,
  ForecastDiverged,
  TangentDegenerate,
  NumericIntegrity,
  Io,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. The code identifies the failure class so that
/// callers (the harness in particular) can record per-seed failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the closed-loop forecast when a predicted component leaves the
/// divergence bound.
class ForecastDiverged : public Error {
 public:
  ForecastDiverged(std::size_t step, const std::string& what)
      : Error(ErrorCode::ForecastDiverged, what + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace qrc
