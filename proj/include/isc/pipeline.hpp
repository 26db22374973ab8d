#pragma once

#include <optional>
#include <vector>

#include "isc/isc_optimizer.hpp"
#include "isc/phase_codec.hpp"
#include "isc/synth_sim.hpp"

namespace isc {

/// Decoded phase maps of one sphere capture, in roi coordinates.
struct DecodedCapture {
  Roi roi;
  PhaseMap vertical;
  PhaseMap horizontal;
  FringeConfig vertical_cfg;
  FringeConfig horizontal_cfg;

  /// Projector pixel seen by camera pixel (x, y); nullopt when masked,
  /// outside the roi, or outside the coded range.
  std::optional<Vec2> projector_pixel(int x, int y) const;
};

DecodedCapture decode_capture(const SphereCapture& cap, const SceneTruth& rig,
                              double modulation_threshold = kDefaultModulationThreshold);

struct AssemblyOptions {
  int stride = 0;  ///< 0 picks a stride giving about target_samples per sphere
  int target_samples = 1500;
  double margin_px = 2.0;
  double modulation_threshold = kDefaultModulationThreshold;
};

/// Conic fit on the contour plus stride-sampled interior correspondences.
SphereObservation assemble_observation(const SphereCapture& cap, const SceneTruth& rig,
                                       double radius, const AssemblyOptions& opts = {});

/// Builds the two-sphere problem from a bundle. Only rig-side inputs are read
/// from the truth (resolutions, fringe ladder, known radii). Throws
/// InvalidInput unless the bundle holds exactly two spheres.
IscProblem problem_from_bundle(const SceneBundle& bundle, const AssemblyOptions& opts = {},
                               std::optional<double> mu = std::nullopt);

/// Every decodable pixel of a capture as (x_c, x_p) pairs, row-major; X is
/// left zero.
std::vector<Correspondence> decoded_correspondences(const DecodedCapture& decoded);

}  // namespace isc
