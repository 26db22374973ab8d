#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isc {

enum class ErrorCode {
  TooFewPoints,
  DegenerateConic,
  CoincidentConics,
  NonRealSelection,
  NotASphereImage,
  BehindCamera,
  RayMissesSphere,
  DimensionMismatch,
  OutOfRange,
  DegenerateConfiguration,
  PointAtInfinity,
  SingularBlock,
  InfeasibleCandidate,
  NoFeasibleStart,
  SphereOutOfView,
  SpheresOverlapInImage,
  NearParallelRays,
  InvalidInput,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a stable error code. Every failure raised by the
/// library goes through this type so callers (the CLI in particular) can map
/// codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace isc
