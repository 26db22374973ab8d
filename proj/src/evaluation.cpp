#include "isc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "isc/error.hpp"

namespace isc {

namespace {

double relative_percent(double est, double truth) { return 100.0 * (est - truth) / truth; }

void add_intrinsics(std::vector<ErrorRow>& rows, const std::string& device, const Intrinsics& est,
                    const Intrinsics& truth) {
  const std::pair<const char*, double Intrinsics::*> fields[] = {
      {"f_x", &Intrinsics::fx}, {"f_y", &Intrinsics::fy}, {"skew", &Intrinsics::skew},
      {"u_0", &Intrinsics::u0}, {"v_0", &Intrinsics::v0}};
  for (const auto& [name, field] : fields) {
    rows.push_back({device, name, truth.*field, est.*field, relative_percent(est.*field, truth.*field), "%"});
  }
}

}  // namespace

const ErrorRow& ErrorReport::row(const std::string& device, const std::string& name) const {
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [&](const ErrorRow& r) { return r.device == device && r.name == name; });
  if (it == rows.end()) throw Error(ErrorCode::InvalidInput, "no report row " + device + "." + name);
  return *it;
}

std::string ErrorReport::format() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %-12s %14s %14s %12s\n", "device", "parameter", "truth",
                "estimate", "error");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-11s %-12s %14.4f %14.4f %10.4f %s\n", r.device.c_str(),
                  r.name.c_str(), r.truth, r.estimate, r.error, r.unit.c_str());
    out += line;
  }
  return out;
}

ErrorReport evaluate_against_truth(const Intrinsics& k_c, const Decomposition& projector,
                                   const SceneTruth& truth) {
  ErrorReport report;
  add_intrinsics(report.rows, "camera", k_c, truth.k_c);
  add_intrinsics(report.rows, "projector", projector.k, truth.k_p);

  const Mat3 delta = projector.r * truth.r.transpose();
  const double cos_angle = std::clamp(0.5 * (delta.trace() - 1.0), -1.0, 1.0);
  const double angle = std::acos(cos_angle) * 180.0 / std::numbers::pi;
  report.rows.push_back({"extrinsics", "rotation", 0.0, angle, angle, "deg"});

  const double t_err = 100.0 * (projector.t - truth.t).norm() / truth.t.norm();
  report.rows.push_back({"extrinsics", "translation", truth.t.norm(), projector.t.norm(), t_err, "%"});
  return report;
}

ErrorReport evaluate_against_truth(const CalibResult& result, const SceneTruth& truth) {
  return evaluate_against_truth(result.k_c, result.projector, truth);
}

}  // namespace isc
