#pragma once

#include <optional>
#include <span>
#include <vector>

#include "isc/geom.hpp"

namespace isc {

/// Sphere in the camera frame. Lengths share one arbitrary unit.
struct SpherePose {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Relative tolerance on the split of the double eigenvalue of the
/// back-projected cone.
inline constexpr double kExactPairTolerance = 1e-6;
inline constexpr double kNoisyPairTolerance = 1e-2;

/// Recovers the sphere center from its silhouette conic. The cone K^T C K is
/// eigendecomposed; the single eigenvalue of opposite sign gives the axis and
/// the ratio to the double pair gives the half-angle.
///
/// `pair_tolerance` bounds the relative gap between the two same-sign
/// eigenvalues; pass infinity to accept any circular-cone approximation (the
/// calibration objective does this for off-truth candidates).
///
/// Throws NotASphereImage or BehindCamera.
SpherePose sphere_center_from_conic(const Conic& c, const Intrinsics& k, double radius,
                                    double pair_tolerance = kExactPairTolerance);

/// Near intersection of the pixel's viewing ray with the sphere.
/// Throws RayMissesSphere outside the tolerance band around the silhouette.
Vec3 lift_pixel_to_sphere(const Vec2& pixel, const Intrinsics& k, const SpherePose& pose);

enum class MissPolicy {
  Reject,         ///< misses come back as std::nullopt
  ClampToTangent  ///< misses take the ray point closest to the center
};

/// Batch lifting kernel (OpenMP). Output order matches input order.
std::vector<std::optional<Vec3>> lift_pixels(std::span<const Vec2> pixels, const Intrinsics& k,
                                             const SpherePose& pose, MissPolicy policy);

namespace reference {
/// Serial reference for lift_pixels; bit-identical by contract.
std::vector<std::optional<Vec3>> lift_pixels(std::span<const Vec2> pixels, const Intrinsics& k,
                                             const SpherePose& pose, MissPolicy policy);
}  // namespace reference

/// Integer pixels on a stride-aligned grid inside the ellipse, at least
/// `margin_px` (Sampson distance) away from the silhouette.
std::vector<Vec2> sample_interior_pixels(const Conic& c, int stride, double margin_px = 2.0);

}  // namespace isc
