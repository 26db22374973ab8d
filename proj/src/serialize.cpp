#include "isc/serialize.hpp"

#include <algorithm>

#include "isc/error.hpp"
#include "isc/rng.hpp"

namespace isc {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, "field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Returns nullptr for a missing optional field.
const Json* member(const Json& obj, const std::string& path, const std::string& key, bool required) {
  if (!obj.is_object()) field_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) field_error(join(path, key), "missing");
    return nullptr;
  }
  return &*it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_field(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) field_error(path, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(j[static_cast<size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

Mat3 matrix3_field(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) field_error(path, "expected a 3x3 array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vector_field<3>(j[static_cast<size_t>(r)], path + "[" + std::to_string(r) + "]");
  return m;
}

void resolution_field(const Json& obj, const std::string& path, bool required, int& w, int& h) {
  if (const Json* r = member(obj, path, "resolution_px", required)) {
    const std::string p = join(path, "resolution_px");
    if (!r->is_array() || r->size() != 2) field_error(p, "expected [width, height]");
    w = integer((*r)[0], p + "[0]");
    h = integer((*r)[1], p + "[1]");
    if (w < 1 || h < 1) field_error(p, "must be positive");
  }
}

void intrinsics_field(const Json& obj, const std::string& path, bool required, Intrinsics& k) {
  const Json* j = member(obj, path, "intrinsics_px", required);
  if (!j) return;
  const std::string p = join(path, "intrinsics_px");
  const std::pair<const char*, double Intrinsics::*> fields[] = {
      {"fx", &Intrinsics::fx}, {"fy", &Intrinsics::fy}, {"skew", &Intrinsics::skew},
      {"u0", &Intrinsics::u0}, {"v0", &Intrinsics::v0}};
  for (const auto& [name, field] : fields) {
    if (const Json* v = member(*j, p, name, required)) k.*field = number(*v, join(p, name));
  }
  if (!(k.fx > 0.0)) field_error(join(p, "fx"), "must be > 0");
  if (!(k.fy > 0.0)) field_error(join(p, "fy"), "must be > 0");
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

Json to_json(const Intrinsics& k) {
  return Json{{"fx", k.fx}, {"fy", k.fy}, {"skew", k.skew}, {"u0", k.u0}, {"v0", k.v0}};
}

Intrinsics intrinsics_from_json(const Json& j) {
  Intrinsics k;
  k.fx = number(*member(j, "K", "fx", true), "K.fx");
  k.fy = number(*member(j, "K", "fy", true), "K.fy");
  k.skew = number(*member(j, "K", "skew", true), "K.skew");
  k.u0 = number(*member(j, "K", "u0", true), "K.u0");
  k.v0 = number(*member(j, "K", "v0", true), "K.v0");
  return k;
}

Json to_json(const Conic& c) {
  const auto coeffs = c.normalized().coefficients();
  return Json(std::vector<double>(coeffs.begin(), coeffs.end()));
}

Conic conic_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 6) field_error("conic", "expected 6 coefficients");
  std::array<double, 6> c{};
  for (size_t i = 0; i < 6; ++i) c[i] = number(j[i], "conic[" + std::to_string(i) + "]");
  return Conic::from_coefficients(c);
}

Json to_json(const SpherePose& s) {
  return Json{{"center", vec_json(s.center)}, {"radius", s.radius}};
}

SpherePose sphere_from_json(const Json& j) {
  return {vector_field<3>(*member(j, "sphere", "center", true), "sphere.center"),
          number(*member(j, "sphere", "radius", true), "sphere.radius")};
}

Json to_json(const ProjMatrix& m) { return matrix_json(m.matrix()); }

ProjMatrix proj_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) field_error("M", "expected a 3x4 array");
  Mat34 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vector_field<4>(j[static_cast<size_t>(r)], "M[" + std::to_string(r) + "]");
  return ProjMatrix(m);
}

Json to_json(const Decomposition& d) {
  return Json{{"K", to_json(d.k)}, {"R", matrix_json(d.r)}, {"T", vec_json(d.t)}};
}

Json to_json(const SceneTruth& t) {
  Json spheres = Json::array();
  for (const auto& s : t.spheres) {
    spheres.push_back(Json{{"center_length", vec_json(s.center)}, {"radius_length", s.radius}});
  }
  return Json{
      {"name", t.name},
      {"camera", {{"resolution_px", {t.cam_w, t.cam_h}}, {"intrinsics_px", to_json(t.k_c)}}},
      {"projector",
       {{"resolution_px", {t.proj_w, t.proj_h}},
        {"intrinsics_px", to_json(t.k_p)},
        {"rotation", matrix_json(t.r)},
        {"translation_length", vec_json(t.t)}}},
      {"spheres", spheres},
      {"fringe", {{"steps", t.steps}, {"frequencies_cycles", t.freqs}}},
      {"noise",
       {{"contour_sigma_px", t.noise.contour_sigma},
        {"intensity_sigma", t.noise.intensity_sigma},
        {"seed", t.noise.seed},
        {"generator", kNoiseGenerator}}},
      {"contour_points", t.contour_points},
  };
}

SceneTruth scene_from_json(const Json& j) {
  if (!j.is_object()) field_error("<root>", "expected an object");
  SceneTruth t;
  bool required = true;
  if (const Json* p = member(j, "", "preset", false)) {
    if (!p->is_string()) field_error("preset", "expected a string");
    try {
      t = scene_preset(p->get<std::string>());
    } catch (const Error& e) {
      field_error("preset", e.what());
    }
    required = false;
  }
  if (const Json* n = member(j, "", "name", false)) {
    if (!n->is_string()) field_error("name", "expected a string");
    t.name = n->get<std::string>();
  }
  if (const Json* cam = member(j, "", "camera", required)) {
    resolution_field(*cam, "camera", required, t.cam_w, t.cam_h);
    intrinsics_field(*cam, "camera", required, t.k_c);
  }
  if (const Json* proj = member(j, "", "projector", required)) {
    resolution_field(*proj, "projector", required, t.proj_w, t.proj_h);
    intrinsics_field(*proj, "projector", required, t.k_p);
    if (const Json* r = member(*proj, "projector", "rotation", required)) {
      t.r = matrix3_field(*r, "projector.rotation");
      if (std::abs(t.r.determinant() - 1.0) > 1e-9 || !(t.r * t.r.transpose()).isIdentity(1e-9)) {
        field_error("projector.rotation", "not a rotation matrix");
      }
    }
    if (const Json* tr = member(*proj, "projector", "translation_length", required)) {
      t.t = vector_field<3>(*tr, "projector.translation_length");
    }
  }
  if (const Json* spheres = member(j, "", "spheres", required)) {
    if (!spheres->is_array() || spheres->empty()) field_error("spheres", "expected a non-empty array");
    t.spheres.clear();
    for (size_t i = 0; i < spheres->size(); ++i) {
      const std::string p = "spheres[" + std::to_string(i) + "]";
      const Json& s = (*spheres)[i];
      SpherePose pose;
      pose.center = vector_field<3>(*member(s, p, "center_length", true), join(p, "center_length"));
      pose.radius = number(*member(s, p, "radius_length", true), join(p, "radius_length"));
      if (!(pose.radius > 0.0)) field_error(join(p, "radius_length"), "must be > 0");
      t.spheres.push_back(pose);
    }
  }
  if (const Json* f = member(j, "", "fringe", false)) {
    if (const Json* s = member(*f, "fringe", "steps", false)) t.steps = integer(*s, "fringe.steps");
    if (const Json* fr = member(*f, "fringe", "frequencies_cycles", false)) {
      if (!fr->is_array()) field_error("fringe.frequencies_cycles", "expected an array");
      t.freqs.clear();
      for (size_t i = 0; i < fr->size(); ++i) {
        t.freqs.push_back(number((*fr)[i], "fringe.frequencies_cycles[" + std::to_string(i) + "]"));
      }
    }
    try {
      t.fringe(Orientation::Vertical).validate();
    } catch (const Error& e) {
      field_error("fringe", e.what());
    }
  }
  if (const Json* nz = member(j, "", "noise", false)) {
    if (const Json* v = member(*nz, "noise", "contour_sigma_px", false)) t.noise.contour_sigma = number(*v, "noise.contour_sigma_px");
    if (const Json* v = member(*nz, "noise", "intensity_sigma", false)) t.noise.intensity_sigma = number(*v, "noise.intensity_sigma");
    if (const Json* v = member(*nz, "noise", "seed", false)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        field_error("noise.seed", "expected a non-negative integer");
      }
      t.noise.seed = v->get<std::uint64_t>();
    }
    if (t.noise.contour_sigma < 0.0) field_error("noise.contour_sigma_px", "must be >= 0");
    if (t.noise.intensity_sigma < 0.0) field_error("noise.intensity_sigma", "must be >= 0");
  }
  if (const Json* c = member(j, "", "contour_points", false)) {
    t.contour_points = integer(*c, "contour_points");
    if (t.contour_points < 6) field_error("contour_points", "must be >= 6");
  }
  t.validate();
  return t;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min(text.size(), static_cast<size_t>(e.byte));
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw Error(ErrorCode::InvalidInput, source + ":" + std::to_string(line) + ": JSON syntax error");
  }
}

Json to_json(const CalibResult& r) {
  Json spheres = Json::array();
  for (size_t s = 0; s < 2; ++s) {
    spheres.push_back(Json{{"correspondences", r.counts[s]},
                           {"mean_residual_px", r.sphere_mean_residual[s]},
                           {"rms_residual_px", r.sphere_rms_residual[s]}});
  }
  return Json{
      {"camera", {{"K", to_json(r.k_c)}}},
      {"projector", {{"M", to_json(r.m_p)}, {"K", to_json(r.projector.k)}, {"R", matrix_json(r.projector.r)}, {"T", vec_json(r.projector.t)}}},
      {"objective_px", r.objective},
      {"constraint",
       {{"residual", r.constraint_residual},
        {"mu", r.mu},
        {"status", r.constraint_checked ? "checked" : "unchecked"}}},
      {"spheres", spheres},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"initial_focal_px", r.initial_focal},
  };
}

StoredCalibration calibration_from_json(const Json& j) {
  const Json& cam = *member(j, "", "camera", true);
  const Json& proj = *member(j, "", "projector", true);
  StoredCalibration out;
  out.k_c = intrinsics_from_json(*member(cam, "camera", "K", true));
  if (!out.k_c.valid()) field_error("camera.K", "focal lengths must be positive");
  out.m_p = proj_matrix_from_json(*member(proj, "projector", "M", true));
  out.projector = decompose(out.m_p);
  return out;
}

Json to_json(const ErrorReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"device", row.device}, {"parameter", row.name}, {"truth", row.truth},
                        {"estimate", row.estimate}, {"error", row.error}, {"unit", row.unit}});
  }
  return rows;
}

Json to_json(const CloudStats& s) {
  Json j{{"points", s.points}, {"skipped", s.skipped}};
  if (s.has_truth) {
    j["rmse_length"] = s.rmse;
    j["rmse_over_radius"] = s.rmse_over_radius;
    j["sphere_rmse_length"] = s.sphere_rmse;
  }
  if (s.points == 0) j["note"] = "no valid correspondences after masking";
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace isc
