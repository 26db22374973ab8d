#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "isc/geom.hpp"
#include "isc/projector_dlt.hpp"
#include "isc/sphere_pose.hpp"
#include "isc/synth_sim.hpp"

namespace isc::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Mat3 random_rotation(Rng& rng) {
  // Uniform quaternion.
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Mat3 rotation_about(const Vec3& axis, double radians) {
  return Eigen::AngleAxisd(radians, axis.normalized()).toRotationMatrix();
}

inline Intrinsics random_intrinsics(Rng& rng) {
  return {uniform(rng, 300.0, 4000.0), uniform(rng, 300.0, 4000.0), uniform(rng, -30.0, 30.0),
          uniform(rng, 200.0, 2000.0), uniform(rng, 200.0, 1500.0)};
}

/// Tangent points of the viewing cone, built from the sphere geometry alone:
/// rays at half-angle asin(r/d) about the center direction.
inline std::vector<Vec2> tangent_cone_pixels(const SpherePose& pose, const Intrinsics& k, int count) {
  const Vec3 axis = pose.center.normalized();
  const double d = pose.center.norm();
  const double half = std::asin(pose.radius / d);
  Vec3 e1 = axis.cross(Vec3::UnitX());
  if (e1.norm() < 0.1) e1 = axis.cross(Vec3::UnitY());
  e1.normalize();
  const Vec3 e2 = axis.cross(e1);
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    const Vec3 ray = std::cos(half) * axis + std::sin(half) * (std::cos(t) * e1 + std::sin(t) * e2);
    const Vec3 h = k.matrix() * ray;
    out.emplace_back(h.x() / h.z(), h.y() / h.z());
  }
  return out;
}

inline double relative_matrix_distance(const Mat3& a, const Mat3& b) {
  const Mat3 an = a / a.norm();
  const Mat3 bn = b / b.norm();
  return std::min((an - bn).norm(), (an + bn).norm());
}

inline double rel(double est, double truth) { return std::abs(est - truth) / std::abs(truth); }

/// Noiseless cppA bundle, rendered once per test binary.
const SceneBundle& cached_bundle(const std::string& preset);

}  // namespace isc::test
