#include "isc/synth_sim.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "isc/error.hpp"
#include "isc/parallel.hpp"
#include "isc/rng.hpp"

namespace isc {

namespace {

constexpr std::uint64_t kContourStream = 1ULL << 40;
constexpr std::uint64_t kIntensityStream = 2ULL << 40;
constexpr int kRoiPad = 3;

Mat3 rotation_about_y(double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  Mat3 r;
  r << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
  return r;
}

bool box_inside(const std::array<double, 4>& box, double w, double h) {
  return box[0] >= 0.0 && box[1] >= 0.0 && box[2] <= w - 1.0 && box[3] <= h - 1.0;
}

// Per-pixel geometry shared by both render kernels.
struct PixelHit {
  bool lit = false;
  Vec2 x_p = Vec2::Zero();
  Vec3 X = Vec3::Zero();
};

PixelHit shade_pixel(const std::optional<Vec3>& hit, const SpherePose& pose, const Vec3& proj_center,
                     const ProjMatrix& m, int proj_w, int proj_h) {
  PixelHit out;
  if (!hit) return out;
  const Vec3& x = *hit;
  const Vec3 normal = (x - pose.center) / pose.radius;
  if (!(normal.dot(proj_center - x) > 0.0)) return out;
  const Vec3 h = m.apply(x);
  if (!(h.z() > 0.0)) return out;
  const Vec2 xp = h.head<2>() / h.z();
  if (xp.x() < 0.0 || xp.y() < 0.0 || xp.x() >= proj_w || xp.y() >= proj_h) return out;
  out.lit = true;
  out.x_p = xp;
  out.X = x;
  return out;
}

// All fringe values of one pixel, image m = (orientation * F + freq) * N + step.
inline float pixel_value(const SceneTruth& truth, const PixelHit& hit, size_t sphere, int m,
                         size_t idx) {
  const int n = truth.steps;
  const int f_count = static_cast<int>(truth.freqs.size());
  const int orientation = m / (f_count * n);
  const int freq = (m / n) % f_count;
  const int step = m % n;
  double v = 0.0;
  if (hit.lit) {
    const double u = orientation == 0 ? hit.x_p.x() : hit.x_p.y();
    const int extent = orientation == 0 ? truth.proj_w : truth.proj_h;
    v = pattern_value(u, truth.freqs[static_cast<size_t>(freq)], step, n, extent);
  }
  if (truth.noise.intensity_sigma > 0.0) {
    const std::uint64_t stream = kIntensityStream | (static_cast<std::uint64_t>(sphere) << 32) |
                                 static_cast<std::uint64_t>(m);
    v += truth.noise.intensity_sigma * counter_gaussian(truth.noise.seed, stream, idx);
  }
  return static_cast<float>(v);
}

void check_layout(const SceneTruth& truth, const std::vector<Conic>& conics) {
  for (size_t s = 0; s < truth.spheres.size(); ++s) {
    const auto& pose = truth.spheres[s];
    if (!box_inside(conics[s].bounding_box(), truth.cam_w, truth.cam_h)) {
      throw Error(ErrorCode::SphereOutOfView, "sphere " + std::to_string(s) + " leaves the camera image");
    }
    // Illumination: the sphere's silhouette in the projector must fit its frame.
    const SpherePose in_proj{truth.r * pose.center + truth.t, pose.radius};
    if (!(in_proj.center.z() > pose.radius)) {
      throw Error(ErrorCode::SphereOutOfView, "sphere " + std::to_string(s) + " is behind the projector");
    }
    const Conic pc = project_sphere_to_conic(in_proj, truth.k_p);
    if (!box_inside(pc.bounding_box(), truth.proj_w, truth.proj_h)) {
      throw Error(ErrorCode::SphereOutOfView,
                  "sphere " + std::to_string(s) + " is not fully inside the projector frustum");
    }
  }
  for (size_t a = 0; a < truth.spheres.size(); ++a) {
    for (size_t b = a + 1; b < truth.spheres.size(); ++b) {
      const auto& pa = truth.spheres[a];
      const auto& pb = truth.spheres[b];
      if ((pa.center - pb.center).norm() <= pa.radius + pb.radius) {
        throw Error(ErrorCode::InvalidInput, "spheres intersect");
      }
      for (const auto& [i, j] : {std::pair{a, b}, std::pair{b, a}}) {
        const auto pts = sphere_contour_points(truth.spheres[i], truth.k_c, 720);
        for (const auto& p : pts) {
          if (conics[j].evaluate(p) <= 0.0) {
            throw Error(ErrorCode::SpheresOverlapInImage, "sphere silhouettes overlap");
          }
        }
        if (conics[j].evaluate(conics[i].center()) <= 0.0) {
          throw Error(ErrorCode::SpheresOverlapInImage, "sphere silhouettes overlap");
        }
      }
    }
  }
}

template <bool Parallel>
SceneBundle render(const SceneTruth& truth) {
  truth.validate();
  truth.fringe(Orientation::Vertical).validate();
  std::vector<Conic> conics;
  for (const auto& pose : truth.spheres) conics.push_back(project_sphere_to_conic(pose, truth.k_c));
  check_layout(truth, conics);

  const ProjMatrix m = truth.projector_matrix();
  const Vec3 proj_center = truth.projector_center();
  const int per_axis = truth.steps * static_cast<int>(truth.freqs.size());

  SceneBundle bundle{truth, {}};
  for (size_t s = 0; s < truth.spheres.size(); ++s) {
    const SpherePose& pose = truth.spheres[s];
    SphereCapture cap;

    cap.contour = sphere_contour_points(pose, truth.k_c, truth.contour_points);
    if (truth.noise.contour_sigma > 0.0) {
      for (size_t j = 0; j < cap.contour.size(); ++j) {
        for (int c = 0; c < 2; ++c) {
          cap.contour[j](c) += truth.noise.contour_sigma *
                               counter_gaussian(truth.noise.seed, kContourStream | s, 2 * j + static_cast<size_t>(c));
        }
      }
    }

    const auto box = conics[s].bounding_box();
    const int x0 = std::max(0, static_cast<int>(std::floor(box[0])) - kRoiPad);
    const int y0 = std::max(0, static_cast<int>(std::floor(box[1])) - kRoiPad);
    const int x1 = std::min(truth.cam_w - 1, static_cast<int>(std::ceil(box[2])) + kRoiPad);
    const int y1 = std::min(truth.cam_h - 1, static_cast<int>(std::ceil(box[3])) + kRoiPad);
    cap.roi = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};

    std::vector<Vec2> pixels;
    pixels.reserve(static_cast<size_t>(cap.roi.width) * cap.roi.height);
    for (int y = 0; y < cap.roi.height; ++y) {
      for (int x = 0; x < cap.roi.width; ++x) pixels.emplace_back(x0 + x, y0 + y);
    }
    const auto lifted = Parallel ? lift_pixels(pixels, truth.k_c, pose, MissPolicy::Reject)
                                 : reference::lift_pixels(pixels, truth.k_c, pose, MissPolicy::Reject);

    std::vector<PixelHit> hits(pixels.size());
    std::vector<ImageF> images(static_cast<size_t>(2 * per_axis), ImageF(cap.roi.width, cap.roi.height));
    const auto count = static_cast<long>(pixels.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
      for (long i = 0; i < count; ++i) {
        const auto idx = static_cast<size_t>(i);
        hits[idx] = shade_pixel(lifted[idx], pose, proj_center, m, truth.proj_w, truth.proj_h);
        for (int img = 0; img < 2 * per_axis; ++img) {
          images[static_cast<size_t>(img)].pixels[idx] = pixel_value(truth, hits[idx], s, img, idx);
        }
      }
    } else {
      for (long i = 0; i < count; ++i) {
        const auto idx = static_cast<size_t>(i);
        hits[idx] = shade_pixel(lifted[idx], pose, proj_center, m, truth.proj_w, truth.proj_h);
        for (int img = 0; img < 2 * per_axis; ++img) {
          images[static_cast<size_t>(img)].pixels[idx] = pixel_value(truth, hits[idx], s, img, idx);
        }
      }
    }

    for (size_t idx = 0; idx < hits.size(); ++idx) {
      if (hits[idx].lit) cap.oracle.push_back({pixels[idx], hits[idx].x_p, hits[idx].X});
    }
    cap.vertical.assign(std::make_move_iterator(images.begin()),
                        std::make_move_iterator(images.begin() + per_axis));
    cap.horizontal.assign(std::make_move_iterator(images.begin() + per_axis),
                          std::make_move_iterator(images.end()));
    bundle.spheres.push_back(std::move(cap));
  }
  return bundle;
}

}  // namespace

void SceneTruth::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, what); };
  if (cam_w < 1 || cam_h < 1) fail("camera resolution must be positive");
  if (proj_w < 1 || proj_h < 1) fail("projector resolution must be positive");
  if (!k_c.valid()) fail("camera focal lengths must be positive");
  if (!k_p.valid()) fail("projector focal lengths must be positive");
  if (std::abs(r.determinant() - 1.0) > 1e-9 || !(r * r.transpose()).isIdentity(1e-9)) {
    fail("projector rotation is not a rotation matrix");
  }
  if (spheres.empty()) fail("scene needs at least one sphere");
  for (const auto& s : spheres) {
    if (!(s.radius > 0.0)) fail("sphere radius must be positive");
  }
  if (contour_points < 6) fail("contour_points must be >= 6");
  if (noise.contour_sigma < 0.0 || noise.intensity_sigma < 0.0) fail("noise sigmas must be >= 0");
}

SceneTruth scene_preset(const std::string& name) {
  SceneTruth t;
  t.name = name;
  if (name == "cppA") {
    t.k_c = {3277.5, 3277.8, -18.6, 1699.4, 1330.1};
    t.cam_w = 3384;
    t.cam_h = 2704;
  } else if (name == "cppB") {
    t.k_c = {1791.1, 1789.2, -1.4, 944.9, 561.4};
    t.cam_w = 1920;
    t.cam_h = 1200;
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown preset '" + name + "' (expected cppA or cppB)");
  }
  t.k_p = {1202.7, 1199.0, -8.2, 390.7, 222.8};
  t.proj_w = 854;
  t.proj_h = 480;

  // Baseline of one length unit (0.2 x mean sphere depth of 5); projector at
  // +x, turned 15 degrees about y toward the spheres.
  const double baseline = 1.0;
  const Vec3 proj_center(baseline, 0.0, 0.0);
  t.r = rotation_about_y(15.0);
  t.t = -t.r * proj_center;

  const double mean_depth = 5.0 * baseline;
  const double diagonal = std::hypot(t.cam_w, t.cam_h);
  const double radius = 0.075 * diagonal * mean_depth / t.k_c.fx;
  t.spheres = {{Vec3(-0.6, 0.0, 4.5), radius}, {Vec3(0.7, 0.05, 5.5), radius}};
  return t;
}

Conic project_sphere_to_conic(const SpherePose& pose, const Intrinsics& k) {
  if (!(pose.center.z() > pose.radius)) {
    throw Error(ErrorCode::BehindCamera, "sphere is not in front of the camera");
  }
  const Vec3& x = pose.center;
  const Mat3 cone = x * x.transpose() - (x.squaredNorm() - pose.radius * pose.radius) * Mat3::Identity();
  const Mat3 kinv = k.inverse();
  return Conic(kinv.transpose() * cone * kinv).normalized();
}

std::vector<Vec2> sphere_contour_points(const SpherePose& pose, const Intrinsics& k, int count) {
  const Vec3 axis = pose.center.normalized();
  const double sin_a = pose.radius / pose.center.norm();
  const double cos_a = std::sqrt(1.0 - sin_a * sin_a);
  Vec3 u1 = axis.cross(Vec3::UnitY());
  if (u1.norm() < 1e-6) u1 = axis.cross(Vec3::UnitX());
  u1.normalize();
  const Vec3 u2 = axis.cross(u1);
  const Mat3 km = k.matrix();
  std::vector<Vec2> out;
  out.reserve(static_cast<size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double th = 2.0 * std::numbers::pi * j / count;
    const Vec3 d = cos_a * axis + sin_a * (std::cos(th) * u1 + std::sin(th) * u2);
    const Vec3 h = km * d;
    out.emplace_back(h.x() / h.z(), h.y() / h.z());
  }
  return out;
}

SceneBundle render_scene(const SceneTruth& truth) { return render<true>(truth); }

namespace reference {
SceneBundle render_scene(const SceneTruth& truth) { return render<false>(truth); }
}  // namespace reference

}  // namespace isc
