#include "isc/sphere_pose.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "isc/error.hpp"
#include "isc/parallel.hpp"

namespace isc {

SpherePose sphere_center_from_conic(const Conic& c, const Intrinsics& k, double radius,
                                    double pair_tolerance) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "sphere radius must be positive");
  const Mat3 km = k.matrix();
  Mat3 q = km.transpose() * c.matrix() * km;
  q = 0.5 * (q + q.transpose());
  q /= q.norm();

  Eigen::SelfAdjointEigenSolver<Mat3> es(q);
  Vec3 w = es.eigenvalues();
  int positives = 0;
  for (int i = 0; i < 3; ++i) positives += w(i) > 0.0 ? 1 : 0;
  if (positives == 1) {
    w = -w;
  } else if (positives != 2) {
    throw Error(ErrorCode::NotASphereImage, "cone lacks the (+,+,-) eigenvalue pattern");
  }
  int single = -1;
  for (int i = 0; i < 3; ++i) {
    if (w(i) < 0.0) single = i;
  }
  const int a = (single + 1) % 3, b = (single + 2) % 3;
  if (single < 0 || !(w(a) > 0.0) || !(w(b) > 0.0)) {
    throw Error(ErrorCode::NotASphereImage, "cone lacks the (+,+,-) eigenvalue pattern");
  }
  const double gap = std::abs(w(a) - w(b)) / std::max(w(a), w(b));
  if (gap > pair_tolerance) {
    throw Error(ErrorCode::NotASphereImage, "cone is not circular (double eigenvalue split " +
                                                std::to_string(gap) + ")");
  }

  // Q ~ cos^2(alpha) I - a a^T: pair = cos^2, single = -sin^2.
  const double pair = 0.5 * (w(a) + w(b));
  const double sin2 = -w(single) / (pair - w(single));
  Vec3 axis = es.eigenvectors().col(single).normalized();
  if (axis.z() < 0.0) axis = -axis;

  SpherePose pose{axis * (radius / std::sqrt(sin2)), radius};
  if (!(pose.center.z() > radius)) {
    throw Error(ErrorCode::BehindCamera, "recovered sphere is not in front of the camera");
  }
  return pose;
}

namespace {

// Ray-sphere near root on the unit ray direction. Returns false on a hard miss.
inline bool near_intersection(const Vec2& pixel, const Mat3& kinv, const SpherePose& pose,
                              MissPolicy policy, Vec3& out) {
  const Vec3 d = (kinv * homogeneous(pixel)).normalized();
  const double b = d.dot(pose.center);
  const double c = pose.center.squaredNorm() - pose.radius * pose.radius;
  const double disc = b * b - c;
  if (disc <= 0.0) {
    if (policy == MissPolicy::Reject && disc < -1e-12 * pose.center.squaredNorm()) return false;
    // tangent point, or the ray point closest to the center on a miss
    out = b * d;
    return true;
  }
  const double root = std::sqrt(disc);
  // (b - root) rewritten to avoid cancellation
  const double t = (b + root) > 0.0 ? c / (b + root) : b - root;
  out = t * d;
  return true;
}

}  // namespace

Vec3 lift_pixel_to_sphere(const Vec2& pixel, const Intrinsics& k, const SpherePose& pose) {
  Vec3 x;
  if (!near_intersection(pixel, k.inverse(), pose, MissPolicy::Reject, x)) {
    throw Error(ErrorCode::RayMissesSphere, "pixel ray does not meet the sphere");
  }
  return x;
}

std::vector<std::optional<Vec3>> lift_pixels(std::span<const Vec2> pixels, const Intrinsics& k,
                                             const SpherePose& pose, MissPolicy policy) {
  const Mat3 kinv = k.inverse();
  const auto n = static_cast<long>(pixels.size());
  std::vector<std::optional<Vec3>> out(pixels.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < n; ++i) {
    Vec3 x;
    if (near_intersection(pixels[static_cast<size_t>(i)], kinv, pose, policy, x)) {
      out[static_cast<size_t>(i)] = x;
    }
  }
  return out;
}

namespace reference {

std::vector<std::optional<Vec3>> lift_pixels(std::span<const Vec2> pixels, const Intrinsics& k,
                                             const SpherePose& pose, MissPolicy policy) {
  const Mat3 kinv = k.inverse();
  std::vector<std::optional<Vec3>> out;
  out.reserve(pixels.size());
  for (const auto& p : pixels) {
    Vec3 x;
    if (near_intersection(p, kinv, pose, policy, x)) {
      out.emplace_back(x);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace reference

std::vector<Vec2> sample_interior_pixels(const Conic& c, int stride, double margin_px) {
  if (stride < 1) throw Error(ErrorCode::InvalidInput, "sampling stride must be >= 1");
  const Conic n = c.normalized();
  if (!n.is_real_ellipse()) throw Error(ErrorCode::NotASphereImage, "conic is not a real ellipse");
  const auto box = n.bounding_box();
  const auto first = [stride](double lo) {
    return static_cast<long>(std::ceil(lo / stride)) * stride;
  };
  std::vector<Vec2> out;
  for (long y = first(box[1]); y <= static_cast<long>(std::floor(box[3])); y += stride) {
    for (long x = first(box[0]); x <= static_cast<long>(std::floor(box[2])); x += stride) {
      const Vec2 p(static_cast<double>(x), static_cast<double>(y));
      if (n.evaluate(p) < 0.0 && n.sampson_distance(p) > margin_px) out.push_back(p);
    }
  }
  return out;
}

}  // namespace isc
