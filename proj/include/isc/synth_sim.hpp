#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isc/geom.hpp"
#include "isc/image.hpp"
#include "isc/phase_codec.hpp"
#include "isc/projector_dlt.hpp"
#include "isc/sphere_pose.hpp"

namespace isc {

struct NoiseConfig {
  double contour_sigma = 0.0;    ///< px, on contour points
  double intensity_sigma = 0.0;  ///< on [0, 1] intensities
  std::uint64_t seed = 0;
};

/// Ground truth of a simulated rig. Projector extrinsics map camera-frame
/// points into the projector frame: X_p = R X + T.
struct SceneTruth {
  std::string name = "custom";
  Intrinsics k_c;
  int cam_w = 0;
  int cam_h = 0;
  Intrinsics k_p;
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  int proj_w = 0;
  int proj_h = 0;
  std::vector<SpherePose> spheres;
  int steps = 4;
  std::vector<double> freqs{1.0, 8.0, 64.0};
  NoiseConfig noise;
  int contour_points = 360;

  ProjMatrix projector_matrix() const { return ProjMatrix::compose(k_p, r, t); }
  Vec3 projector_center() const { return -r.transpose() * t; }
  FringeConfig fringe(Orientation o) const { return {steps, freqs, proj_w, proj_h, o}; }
  /// Throws InvalidInput on malformed values (sizes, focal lengths, radii).
  void validate() const;
};

/// Reference rigs: "cppA" (3384x2704 camera) and "cppB" (1920x1200 camera),
/// both with the 854x480 projector. Throws InvalidInput for other names.
SceneTruth scene_preset(const std::string& name);

/// Exact silhouette conic of a sphere, sign-normalized to a real ellipse.
/// Throws BehindCamera.
Conic project_sphere_to_conic(const SpherePose& pose, const Intrinsics& k);

/// Exact silhouette points, uniformly spaced in angle around the tangent cone.
std::vector<Vec2> sphere_contour_points(const SpherePose& pose, const Intrinsics& k, int count);

/// Camera-pixel window; pixel (x, y) of a capture maps to camera pixel
/// (x0 + x, y0 + y).
struct Roi {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

struct SphereCapture {
  std::vector<Vec2> contour;
  Roi roi;
  /// Frequency-major, `steps` images per frequency, cropped to the roi.
  std::vector<ImageF> vertical;
  std::vector<ImageF> horizontal;
  /// Exact correspondences of every lit pixel, row-major (oracle only).
  std::vector<Correspondence> oracle;
};

struct SceneBundle {
  SceneTruth truth;
  std::vector<SphereCapture> spheres;
};

/// Renders contours, fringe stacks and oracle correspondences. Throws
/// SphereOutOfView, SpheresOverlapInImage, BehindCamera or InvalidInput.
SceneBundle render_scene(const SceneTruth& truth);

namespace reference {
/// Serial reference of the per-pixel fringe rendering kernel.
SceneBundle render_scene(const SceneTruth& truth);
}  // namespace reference

}  // namespace isc
