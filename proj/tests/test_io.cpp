#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "isc/error.hpp"
#include "isc/evaluation.hpp"
#include "isc/io.hpp"
#include "isc/serialize.hpp"
#include "test_support.hpp"

using namespace isc;
using namespace isc::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("isc_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("pgm round trips") {
  TempDir dir("pgm");
  ImageF img(5, 3);
  for (size_t i = 0; i < img.size(); ++i) img.pixels[i] = static_cast<float>(i) / 14.0f;
  img.pixels[0] = -0.2f;  // clamped
  io::write_pgm(dir.path / "a8.pgm", img, 8);
  io::write_pgm(dir.path / "a16.pgm", img, 16);
  const ImageF a8 = io::read_pgm(dir.path / "a8.pgm");
  const ImageF a16 = io::read_pgm(dir.path / "a16.pgm");
  REQUIRE(a8.same_shape(img));
  for (size_t i = 1; i < img.size(); ++i) {
    CHECK(std::abs(a8.pixels[i] - img.pixels[i]) <= 0.5 / 255.0 + 1e-7);
    CHECK(std::abs(a16.pixels[i] - img.pixels[i]) <= 0.5 / 65535.0 + 1e-7);
  }
  CHECK(a8.pixels[0] == 0.0f);
  CHECK_THROWS_AS(io::write_pgm(dir.path / "bad.pgm", img, 12), Error);

  io::write_mask_pgm(dir.path / "m.pgm", 3, 2, {1, 0, 1, 1, 0, 0});
  int w = 0, h = 0;
  CHECK(io::read_mask_pgm(dir.path / "m.pgm", w, h) == std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0});
  CHECK(w == 3);
  CHECK(h == 2);

  io::write_text(dir.path / "junk.pgm", "P2\n1 1\n255\n0\n");
  CHECK(code_of([&] { io::read_pgm(dir.path / "junk.pgm"); }) == ErrorCode::Io);
  CHECK(code_of([&] { io::read_pgm(dir.path / "missing.pgm"); }) == ErrorCode::Io);
}

TEST_CASE("float32 rasters and phase maps round trip exactly") {
  TempDir dir("f32");
  ImageF img(4, 2);
  for (size_t i = 0; i < img.size(); ++i) img.pixels[i] = 0.1f * static_cast<float>(i) - 0.3f;
  io::write_f32(dir.path / "x.f32", img);
  CHECK(io::read_f32(dir.path / "x.f32").pixels == img.pixels);
  CHECK(fs::exists(dir.path / "x.f32.json"));

  PhaseMap map;
  map.width = 2;
  map.height = 2;
  map.phase = {0.5, 1.5, 2.5, 3.5};
  map.modulation = {0.4, 0.4, 0.0, 0.4};
  map.mask = {1, 1, 0, 1};
  io::write_phase_map(dir.path / "phase", map);
  const PhaseMap back = io::read_phase_map(dir.path / "phase");
  CHECK(back.phase == map.phase);
  CHECK(back.mask == map.mask);
}

TEST_CASE("csv and ply writers") {
  TempDir dir("csv");
  const std::vector<Vec2> pts{{0.1, 0.2}, {1e-17, -3.0}};
  io::write_points_csv(dir.path / "p.csv", pts);
  CHECK(io::read_points_csv(dir.path / "p.csv") == pts);

  const std::vector<Correspondence> corrs{{Vec2(1, 2), Vec2(3.25, 4.5), Vec3(0.1, 0.2, 5.0 / 3.0)}};
  io::write_correspondences_csv(dir.path / "c.csv", corrs);
  const auto back = io::read_correspondences_csv(dir.path / "c.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].X == corrs[0].X);
  CHECK(io::read_text(dir.path / "c.csv").rfind("x_c,y_c,x_p,y_p,X,Y,Z\n", 0) == 0);

  io::write_ply(dir.path / "a.ply", {Vec3(1, 2, 3), Vec3(4, 5, 6)}, {0.5, 0.25});
  const std::string ply = io::read_text(dir.path / "a.ply");
  CHECK(ply.find("element vertex 2\n") != std::string::npos);
  CHECK(ply.find("property double error\n") != std::string::npos);
  CHECK(ply.find("end_header\n1 2 3 0.5\n4 5 6 0.25\n") != std::string::npos);
  io::write_ply(dir.path / "empty.ply", {}, {});
  CHECK(io::read_text(dir.path / "empty.ply").find("element vertex 0\n") != std::string::npos);
  CHECK_THROWS_AS(io::write_ply(dir.path / "bad.ply", {Vec3(1, 2, 3)}, {0.1, 0.2}), Error);
}

TEST_CASE("bundles round trip") {
  TempDir dir("bundle");
  SceneTruth t = scene_preset("cppB");
  t.noise = {0.5, 0.01, 9};
  const SceneBundle bundle = render_scene(t);
  io::write_bundle(dir.path / "f32", bundle);
  bool oracle = false;
  const SceneBundle back = io::read_bundle(dir.path / "f32", &oracle);
  CHECK(oracle);
  REQUIRE(back.spheres.size() == 2);
  CHECK(back.truth.k_c == t.k_c);
  CHECK(back.truth.noise.seed == 9);
  for (size_t s = 0; s < 2; ++s) {
    CHECK(back.spheres[s].contour == bundle.spheres[s].contour);
    CHECK(back.spheres[s].vertical[7].pixels == bundle.spheres[s].vertical[7].pixels);
    CHECK(back.spheres[s].horizontal[11].pixels == bundle.spheres[s].horizontal[11].pixels);
    CHECK(back.spheres[s].oracle.size() == bundle.spheres[s].oracle.size());
    CHECK(back.spheres[s].roi.x0 == bundle.spheres[s].roi.x0);
  }

  // Writing the same bundle twice gives identical bytes.
  io::write_bundle(dir.path / "again", bundle);
  for (const auto& entry : fs::recursive_directory_iterator(dir.path / "f32")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir.path / "f32");
    CHECK(io::read_text(entry.path()) == io::read_text(dir.path / "again" / rel));
  }

  io::write_bundle(dir.path / "pgm", bundle, io::StackFormat::Pgm16);
  fs::remove_all(dir.path / "pgm" / "oracle");
  const SceneBundle quantized = io::read_bundle(dir.path / "pgm", &oracle);
  CHECK_FALSE(oracle);
  CHECK(quantized.spheres[0].oracle.empty());
  // 16-bit quantization, ignoring pixels the noise pushed outside [0, 1]
  double worst = 0.0;
  const auto& a = quantized.spheres[0].vertical[0].pixels;
  const auto& b = bundle.spheres[0].vertical[0].pixels;
  for (size_t i = 0; i < a.size(); ++i) {
    if (b[i] < 0.0f || b[i] > 1.0f) continue;
    worst = std::max(worst, static_cast<double>(std::abs(a[i] - b[i])));
  }
  CHECK(worst <= 0.5 / 65535.0 + 1e-7);
}

TEST_CASE("scene json round trip and validation") {
  const SceneTruth a = scene_preset("cppA");
  const SceneTruth back = scene_from_json(to_json(a));
  CHECK(back.k_c == a.k_c);
  CHECK(back.k_p == a.k_p);
  CHECK(back.r == a.r);
  CHECK(back.t == a.t);
  CHECK(back.spheres[1].center == a.spheres[1].center);
  CHECK(back.freqs == a.freqs);

  const SceneTruth over = scene_from_json(Json::parse(R"({"preset": "cppB", "noise": {"seed": 5, "contour_sigma_px": 0.5}})"));
  CHECK(over.k_c == scene_preset("cppB").k_c);
  CHECK(over.noise.seed == 5);
  CHECK(over.noise.contour_sigma == 0.5);

  auto message = [](const std::string& text) -> std::string {
    try {
      scene_from_json(Json::parse(text));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidInput);
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"preset": "cppA", "camera": {"intrinsics_px": {"fx": -1}}})").find("camera.intrinsics_px.fx") != std::string::npos);
  CHECK(message(R"({"preset": "cppA", "spheres": [{"center_length": [0, 0, 5]}]})").find("spheres[0].radius_length") != std::string::npos);
  CHECK(message(R"({"preset": "cppA", "fringe": {"frequencies_cycles": [1, 16]}})").find("fringe") != std::string::npos);
  CHECK(message(R"({"preset": "cppQ"})").find("preset") != std::string::npos);
  CHECK(message(R"({"name": "x"})").find("camera") != std::string::npos);

  try {
    parse_json("{\n  \"a\": 1,\n  oops\n}", "cfg.json");
    FAIL("bad json parsed");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg.json:3") != std::string::npos);
  }
}

TEST_CASE("calibration json round trip") {
  const SceneTruth t = scene_preset("cppA");
  CalibResult r;
  r.k_c = t.k_c;
  r.m_p = t.projector_matrix();
  r.projector = decompose(r.m_p);
  r.constraint_checked = false;
  const Json j = to_json(r);
  CHECK(j["constraint"]["status"] == "unchecked");
  const StoredCalibration back = calibration_from_json(Json::parse(dump(j)));
  CHECK(back.k_c == r.k_c);
  CHECK((back.m_p.matrix() - r.m_p.matrix()).norm() == 0.0);
  CHECK(rel(back.projector.k.fx, t.k_p.fx) < 1e-12);
  CHECK_THROWS_AS(calibration_from_json(Json::parse(R"({"camera": {}})")), Error);

  const Json conic = to_json(project_sphere_to_conic(t.spheres[0], t.k_c));
  CHECK(conic.size() == 6);
  CHECK(relative_matrix_distance(conic_from_json(conic).matrix(), project_sphere_to_conic(t.spheres[0], t.k_c).matrix()) < 1e-15);
  const SpherePose sp = sphere_from_json(to_json(t.spheres[0]));
  CHECK(sp.center == t.spheres[0].center);
  CHECK(intrinsics_from_json(to_json(t.k_p)) == t.k_p);
  CHECK((proj_matrix_from_json(to_json(r.m_p)).matrix() - r.m_p.matrix()).norm() == 0.0);
}

TEST_CASE("error report") {
  const SceneTruth t = scene_preset("cppA");
  const Decomposition exact = decompose(t.projector_matrix());

  const ErrorReport zero = evaluate_against_truth(t.k_c, exact, t);
  REQUIRE(zero.rows.size() == 12);
  for (const auto& row : zero.rows) CHECK(std::abs(row.error) < 1e-9);

  Intrinsics k = t.k_c;
  k.fx *= 1.075;
  const ErrorReport off = evaluate_against_truth(k, exact, t);
  CHECK(off.row("camera", "f_x").error == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(off.row("camera", "f_y").error == 0.0);
  CHECK_THROWS_AS(off.row("camera", "gamma"), Error);

  Decomposition turned = exact;
  turned.r = rotation_about(Vec3(0, 0, 1), 2.0 * std::numbers::pi / 180.0) * exact.r;
  turned.t = 1.1 * exact.t;
  const ErrorReport moved = evaluate_against_truth(t.k_c, turned, t);
  CHECK(moved.row("extrinsics", "rotation").error == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(moved.row("extrinsics", "translation").error == doctest::Approx(10.0).epsilon(1e-9));

  const std::string text = off.format();
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
  CHECK(to_json(off).size() == 12);
}
