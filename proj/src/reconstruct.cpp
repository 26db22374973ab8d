#include "isc/reconstruct.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "isc/error.hpp"
#include "isc/parallel.hpp"
#include "isc/pipeline.hpp"

namespace isc {

namespace {

constexpr double kMinRayAngle = 1e-6;

struct Rig {
  Mat3 cam_inv;
  Mat3 proj_inv;
  Vec3 proj_center;
};

Rig make_rig(const Intrinsics& k_c, const ProjMatrix& m_p) {
  const Mat3 left = m_p.matrix().leftCols<3>();
  return {k_c.inverse(), left.inverse(), m_p.center()};
}

inline bool midpoint(const HomPoint2& x_c, const HomPoint2& x_p, const Rig& rig, Vec3& out) {
  const Vec3 d1 = (rig.cam_inv * x_c).normalized();
  const Vec3 d2 = (rig.proj_inv * x_p).normalized();
  const double sin_angle = d1.cross(d2).norm();
  const double baseline = rig.proj_center.norm();
  if (!(sin_angle > kMinRayAngle) || !(baseline > 0.0)) return false;
  const Vec3 w0 = -rig.proj_center;  // camera origin minus projector center
  const double b = d1.dot(d2);
  const double d = d1.dot(w0), e = d2.dot(w0);
  const double denom = 1.0 - b * b;
  const double s = (b * e - d) / denom;
  const double t = (e - b * d) / denom;
  out = 0.5 * (s * d1 + rig.proj_center + t * d2);
  return true;
}

}  // namespace

Vec3 triangulate(const HomPoint2& x_c, const HomPoint2& x_p, const Intrinsics& k_c, const ProjMatrix& m_p) {
  Vec3 out;
  if (!midpoint(x_c, x_p, make_rig(k_c, m_p), out)) {
    throw Error(ErrorCode::NearParallelRays, "camera and projector rays are near parallel");
  }
  return out;
}

std::vector<std::optional<Vec3>> triangulate_all(std::span<const Correspondence> corrs,
                                                 const Intrinsics& k_c, const ProjMatrix& m_p) {
  const Rig rig = make_rig(k_c, m_p);
  std::vector<std::optional<Vec3>> out(corrs.size());
  const auto n = static_cast<long>(corrs.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<size_t>(i);
    Vec3 x;
    if (midpoint(homogeneous(corrs[idx].x_c), homogeneous(corrs[idx].x_p), rig, x)) out[idx] = x;
  }
  return out;
}

namespace reference {

std::vector<std::optional<Vec3>> triangulate_all(std::span<const Correspondence> corrs,
                                                 const Intrinsics& k_c, const ProjMatrix& m_p) {
  const Rig rig = make_rig(k_c, m_p);
  std::vector<std::optional<Vec3>> out;
  out.reserve(corrs.size());
  for (const auto& c : corrs) {
    Vec3 x;
    if (midpoint(homogeneous(c.x_c), homogeneous(c.x_p), rig, x)) {
      out.emplace_back(x);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace reference

PointCloud reconstruct_cloud(const SceneBundle& bundle, const Intrinsics& k_c, const ProjMatrix& m_p,
                             const std::vector<SpherePose>* truth_spheres) {
  PointCloud cloud;
  if (truth_spheres && truth_spheres->size() != bundle.spheres.size()) {
    throw Error(ErrorCode::InvalidInput, "truth sphere count does not match the bundle");
  }
  double sq_total = 0.0;
  for (size_t s = 0; s < bundle.spheres.size(); ++s) {
    const DecodedCapture decoded = decode_capture(bundle.spheres[s], bundle.truth);
    const auto corrs = decoded_correspondences(decoded);
    const auto points = triangulate_all(corrs, k_c, m_p);
    double sq_sphere = 0.0;
    size_t n_sphere = 0;
    for (const auto& p : points) {
      if (!p) {
        ++cloud.stats.skipped;
        continue;
      }
      cloud.points.push_back(*p);
      cloud.sphere.push_back(static_cast<int>(s));
      if (truth_spheres) {
        const auto& pose = (*truth_spheres)[s];
        const double err = std::abs((*p - pose.center).norm() - pose.radius);
        cloud.error.push_back(err);
        sq_sphere += err * err;
        ++n_sphere;
      }
    }
    if (truth_spheres) {
      cloud.stats.sphere_rmse.push_back(n_sphere ? std::sqrt(sq_sphere / n_sphere) : 0.0);
      sq_total += sq_sphere;
    }
  }
  cloud.stats.points = cloud.points.size();
  if (truth_spheres) {
    cloud.stats.has_truth = true;
    double mean_radius = 0.0;
    for (const auto& pose : *truth_spheres) mean_radius += pose.radius;
    mean_radius /= static_cast<double>(std::max<size_t>(1, truth_spheres->size()));
    cloud.stats.rmse = cloud.points.empty() ? 0.0 : std::sqrt(sq_total / cloud.points.size());
    cloud.stats.rmse_over_radius = cloud.stats.rmse / mean_radius;
  }
  return cloud;
}

}  // namespace isc
