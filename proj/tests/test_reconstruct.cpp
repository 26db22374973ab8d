#include <doctest.h>

#include <cmath>

#include "isc/error.hpp"
#include "isc/pipeline.hpp"
#include "isc/reconstruct.hpp"
#include "isc/serialize.hpp"
#include "test_support.hpp"

using namespace isc;
using namespace isc::test;

TEST_CASE("triangulate recovers hidden points") {
  const SceneBundle& bundle = cached_bundle("cppA");
  const ProjMatrix m = bundle.truth.projector_matrix();
  double worst = 0.0;
  const auto& oracle = bundle.spheres[0].oracle;
  for (size_t i = 0; i < oracle.size(); i += 101) {
    const Vec3 x = triangulate(oracle[i].x_c, oracle[i].x_p, bundle.truth.k_c, m);
    worst = std::max(worst, (x - oracle[i].X).norm() / oracle[i].X.norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("triangulate: axial camera ray") {
  const Intrinsics k{};
  const Mat3 r = rotation_about(Vec3(0, 1, 0), 0.2);
  const ProjMatrix m = ProjMatrix::compose({800.0, 800.0, 0.0, 400.0, 240.0}, r, -r * Vec3(1.0, 0.1, 0.0));
  const Vec3 target(0.0, 0.0, 5.0);
  const Vec3 x = triangulate(Vec2(0.0, 0.0), m.project(target), k, m);
  CHECK(std::abs(x.x()) < 1e-12);
  CHECK(std::abs(x.y()) < 1e-12);
  CHECK(x.z() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("triangulate: homogeneous scale does not matter") {
  const SceneTruth rig = scene_preset("cppB");
  const ProjMatrix m = rig.projector_matrix();
  const Vec3 target(0.1, -0.2, 5.0);
  const Vec3 hc = rig.k_c.matrix() * target;
  const Vec3 hp = m.apply(target);
  const Vec3 a = triangulate(hc, hp, rig.k_c, m);
  const Vec3 b = triangulate(HomPoint2(-3.0 * hc), HomPoint2(0.01 * hp), rig.k_c, m);
  CHECK((a - b).norm() < 1e-12 * a.norm());
  CHECK((a - target).norm() < 1e-10);
}

TEST_CASE("triangulate: no baseline") {
  const ProjMatrix m = ProjMatrix::compose({800.0, 800.0, 0.0, 400.0, 240.0}, rotation_about(Vec3(0, 1, 0), 0.2),
                                           Vec3::Zero());
  try {
    triangulate(Vec2(1.0, 2.0), Vec2(300.0, 200.0), Intrinsics{}, m);
    FAIL("zero baseline triangulated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearParallelRays);
  }
  const std::vector<Correspondence> corrs{{Vec2(1.0, 2.0), Vec2(300.0, 200.0), Vec3::Zero()}};
  CHECK_FALSE(triangulate_all(corrs, Intrinsics{}, m)[0].has_value());
}

TEST_CASE("triangulate_all matches the serial reference bit for bit") {
  const SceneBundle& bundle = cached_bundle("cppA");
  const ProjMatrix m = bundle.truth.projector_matrix();
  const auto& oracle = bundle.spheres[1].oracle;
  const auto par = triangulate_all(oracle, bundle.truth.k_c, m);
  const auto ser = reference::triangulate_all(oracle, bundle.truth.k_c, m);
  REQUIRE(par.size() == ser.size());
  bool same = true;
  for (size_t i = 0; i < par.size(); ++i) {
    if (!par[i] || !ser[i] || *par[i] != *ser[i]) same = false;
  }
  CHECK(same);
}

TEST_CASE("truth calibration is a fixed point of reconstruction") {
  const SceneBundle& bundle = cached_bundle("cppA");
  const PointCloud cloud =
      reconstruct_cloud(bundle, bundle.truth.k_c, bundle.truth.projector_matrix(), &bundle.truth.spheres);
  CHECK(cloud.stats.points > 600000);
  CHECK(cloud.stats.skipped == 0);
  CHECK(cloud.stats.rmse < 1e-6);
  CHECK(cloud.stats.sphere_rmse.size() == 2);
  CHECK(cloud.error.size() == cloud.points.size());

  // Against the hidden points, pixel by pixel (both are row-major per sphere).
  size_t offset = 0;
  double worst = 0.0;
  for (size_t s = 0; s < 2; ++s) {
    const auto& oracle = bundle.spheres[s].oracle;
    const auto decoded = decoded_correspondences(decode_capture(bundle.spheres[s], bundle.truth));
    size_t j = 0;
    for (const auto& c : oracle) {
      while (j < decoded.size() && decoded[j].x_c != c.x_c) ++j;
      if (j == decoded.size()) break;
      worst = std::max(worst, (cloud.points[offset + j] - c.X).norm() / c.X.norm());
    }
    offset += decoded.size();
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("fully masked captures give an empty cloud") {
  SceneBundle bundle = cached_bundle("cppA");
  for (auto& cap : bundle.spheres) {
    for (auto* stack : {&cap.vertical, &cap.horizontal}) {
      for (auto& img : *stack) std::fill(img.pixels.begin(), img.pixels.end(), 0.25f);
    }
  }
  const PointCloud cloud =
      reconstruct_cloud(bundle, bundle.truth.k_c, bundle.truth.projector_matrix(), &bundle.truth.spheres);
  CHECK(cloud.points.empty());
  CHECK(cloud.stats.points == 0);
  const Json j = to_json(cloud.stats);
  CHECK(j["points"] == 0);
  CHECK(j.contains("note"));
}
