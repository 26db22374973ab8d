#include "isc/error.hpp"

namespace isc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateConic: return "DegenerateConic";
    case ErrorCode::CoincidentConics: return "CoincidentConics";
    case ErrorCode::NonRealSelection: return "NonRealSelection";
    case ErrorCode::NotASphereImage: return "NotASphereImage";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::RayMissesSphere: return "RayMissesSphere";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::InfeasibleCandidate: return "InfeasibleCandidate";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::SphereOutOfView: return "SphereOutOfView";
    case ErrorCode::SpheresOverlapInImage: return "SpheresOverlapInImage";
    case ErrorCode::NearParallelRays: return "NearParallelRays";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace isc
