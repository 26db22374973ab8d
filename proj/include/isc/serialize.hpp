#pragma once

#include <string>

#include <json.hpp>

#include "isc/evaluation.hpp"
#include "isc/isc_optimizer.hpp"
#include "isc/reconstruct.hpp"
#include "isc/synth_sim.hpp"

namespace isc {

using Json = nlohmann::ordered_json;

Json to_json(const Intrinsics& k);
Intrinsics intrinsics_from_json(const Json& j);

/// Six unique entries [c11, c12, c13, c22, c23, c33], unit norm, c11 >= 0.
Json to_json(const Conic& c);
Conic conic_from_json(const Json& j);

Json to_json(const SpherePose& s);
SpherePose sphere_from_json(const Json& j);

/// 3x4 row-major in the fixed gauge.
Json to_json(const ProjMatrix& m);
ProjMatrix proj_matrix_from_json(const Json& j);

Json to_json(const Decomposition& d);

/// Scene configuration with explicit unit keys. `scene_from_json` accepts a
/// "preset" key whose values are overridden by the other fields, and reports
/// problems as InvalidInput with the offending field path.
Json to_json(const SceneTruth& t);
SceneTruth scene_from_json(const Json& j);
/// Parses text, reporting syntax errors with a line number.
Json parse_json(const std::string& text, const std::string& source);

Json to_json(const CalibResult& r);
/// Reads back K_C and M_P (decomposition recomputed) from calib.json.
struct StoredCalibration {
  Intrinsics k_c;
  ProjMatrix m_p;
  Decomposition projector;
};
StoredCalibration calibration_from_json(const Json& j);

Json to_json(const ErrorReport& r);
Json to_json(const CloudStats& s);

/// Stable text form: two-space indent plus trailing newline.
std::string dump(const Json& j);

}  // namespace isc
