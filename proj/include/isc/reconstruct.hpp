#pragma once

#include <optional>
#include <span>
#include <vector>

#include "isc/geom.hpp"
#include "isc/projector_dlt.hpp"
#include "isc/synth_sim.hpp"

namespace isc {

/// Midpoint of the common perpendicular between the camera ray through x_c
/// and the projector ray through x_p. Throws NearParallelRays.
Vec3 triangulate(const HomPoint2& x_c, const HomPoint2& x_p, const Intrinsics& k_c, const ProjMatrix& m_p);
inline Vec3 triangulate(const Vec2& x_c, const Vec2& x_p, const Intrinsics& k_c, const ProjMatrix& m_p) {
  return triangulate(homogeneous(x_c), homogeneous(x_p), k_c, m_p);
}

/// Batch kernel (OpenMP); near-parallel pairs come back empty.
std::vector<std::optional<Vec3>> triangulate_all(std::span<const Correspondence> corrs,
                                                 const Intrinsics& k_c, const ProjMatrix& m_p);

namespace reference {
std::vector<std::optional<Vec3>> triangulate_all(std::span<const Correspondence> corrs,
                                                 const Intrinsics& k_c, const ProjMatrix& m_p);
}  // namespace reference

struct CloudStats {
  size_t points = 0;
  size_t skipped = 0;  ///< decoded pixels whose rays were near parallel
  bool has_truth = false;
  double rmse = 0.0;             ///< | ||X - X_S|| - r | over all points
  double rmse_over_radius = 0.0;  ///< rmse / mean radius
  std::vector<double> sphere_rmse;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<int> sphere;      ///< capture index per point
  std::vector<double> error;    ///< distance to the true surface, if known
  CloudStats stats;
};

/// Decodes every capture of the bundle and triangulates all valid pixels,
/// row-major per sphere. Surface errors are reported when `truth_spheres`
/// is given.
PointCloud reconstruct_cloud(const SceneBundle& bundle, const Intrinsics& k_c, const ProjMatrix& m_p,
                             const std::vector<SpherePose>* truth_spheres = nullptr);

}  // namespace isc
