#include "isc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isc/error.hpp"

namespace isc {

std::optional<Vec2> DecodedCapture::projector_pixel(int x, int y) const {
  const int lx = x - roi.x0, ly = y - roi.y0;
  if (lx < 0 || ly < 0 || lx >= roi.width || ly >= roi.height) return std::nullopt;
  if (!vertical.valid(lx, ly) || !horizontal.valid(lx, ly)) return std::nullopt;
  const double pv = vertical.at(lx, ly);
  const double ph = horizontal.at(lx, ly);
  const double fv = vertical_cfg.top_frequency(), fh = horizontal_cfg.top_frequency();
  const double two_pi = 2.0 * std::numbers::pi;
  if (!(pv >= 0.0 && pv <= two_pi * fv && ph >= 0.0 && ph <= two_pi * fh)) return std::nullopt;
  return Vec2(phase_to_proj_coord(pv, fv, vertical_cfg.coded_extent()),
              phase_to_proj_coord(ph, fh, horizontal_cfg.coded_extent()));
}

DecodedCapture decode_capture(const SphereCapture& cap, const SceneTruth& rig,
                              double modulation_threshold) {
  DecodedCapture out;
  out.roi = cap.roi;
  out.vertical_cfg = rig.fringe(Orientation::Vertical);
  out.horizontal_cfg = rig.fringe(Orientation::Horizontal);
  out.vertical = decode_ladder<float>(cap.vertical, out.vertical_cfg, modulation_threshold);
  out.horizontal = decode_ladder<float>(cap.horizontal, out.horizontal_cfg, modulation_threshold);
  if (out.vertical.width != cap.roi.width || out.vertical.height != cap.roi.height ||
      out.horizontal.width != cap.roi.width || out.horizontal.height != cap.roi.height) {
    throw Error(ErrorCode::DimensionMismatch, "fringe stack does not match its roi");
  }
  return out;
}

SphereObservation assemble_observation(const SphereCapture& cap, const SceneTruth& rig,
                                       double radius, const AssemblyOptions& opts) {
  SphereObservation obs;
  obs.radius = radius;
  obs.conic = fit_conic(cap.contour);
  if (!obs.conic.is_real_ellipse()) {
    throw Error(ErrorCode::DegenerateConic, "contour does not fit a real ellipse");
  }
  int stride = opts.stride;
  if (stride <= 0) {
    const auto box = obs.conic.bounding_box();
    const double area = std::numbers::pi / 4.0 * (box[2] - box[0]) * (box[3] - box[1]);
    stride = std::max(1, static_cast<int>(std::floor(std::sqrt(area / std::max(1, opts.target_samples)))));
  }
  const DecodedCapture decoded = decode_capture(cap, rig, opts.modulation_threshold);
  for (const Vec2& p : sample_interior_pixels(obs.conic, stride, opts.margin_px)) {
    if (auto xp = decoded.projector_pixel(static_cast<int>(p.x()), static_cast<int>(p.y()))) {
      obs.x_c.push_back(p);
      obs.x_p.push_back(*xp);
    }
  }
  return obs;
}

IscProblem problem_from_bundle(const SceneBundle& bundle, const AssemblyOptions& opts,
                               std::optional<double> mu) {
  if (bundle.spheres.size() != 2 || bundle.truth.spheres.size() != 2) {
    throw Error(ErrorCode::InvalidInput, "two sphere observations required");
  }
  SphereObservation a = assemble_observation(bundle.spheres[0], bundle.truth, bundle.truth.spheres[0].radius, opts);
  SphereObservation b = assemble_observation(bundle.spheres[1], bundle.truth, bundle.truth.spheres[1].radius, opts);
  return make_problem(std::move(a), std::move(b), bundle.truth.cam_w, bundle.truth.cam_h, mu);
}

std::vector<Correspondence> decoded_correspondences(const DecodedCapture& decoded) {
  std::vector<Correspondence> out;
  for (int y = 0; y < decoded.roi.height; ++y) {
    for (int x = 0; x < decoded.roi.width; ++x) {
      const int cx = decoded.roi.x0 + x, cy = decoded.roi.y0 + y;
      if (auto xp = decoded.projector_pixel(cx, cy)) {
        out.push_back({Vec2(cx, cy), *xp, Vec3::Zero()});
      }
    }
  }
  return out;
}

}  // namespace isc
