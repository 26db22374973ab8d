// isc-calib: simulate, calibrate, reconstruct and evaluate projector-camera rigs.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isc/error.hpp"
#include "isc/evaluation.hpp"
#include "isc/io.hpp"
#include "isc/parallel.hpp"
#include "isc/pipeline.hpp"
#include "isc/reconstruct.hpp"
#include "isc/rng.hpp"
#include "isc/serialize.hpp"
#include "isc/synth_sim.hpp"

namespace fs = std::filesystem;
using namespace isc;

namespace {

enum Exit { kOk = 0, kInput = 2, kInfeasibleScene = 3, kCalibFailure = 4, kDegenerate = 5 };

bool g_quiet = false;

void log(const std::string& msg) {
  if (g_quiet) return;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%H:%M:%S", std::localtime(&now));
  std::cerr << "[" << stamp << "] " << msg << "\n";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SphereOutOfView:
    case ErrorCode::SpheresOverlapInImage:
    case ErrorCode::BehindCamera:
      return kInfeasibleScene;
    case ErrorCode::NoFeasibleStart:
    case ErrorCode::InfeasibleCandidate:
    case ErrorCode::RayMissesSphere:
    case ErrorCode::NearParallelRays:
      return kCalibFailure;
    case ErrorCode::TooFewPoints:
    case ErrorCode::DegenerateConic:
    case ErrorCode::CoincidentConics:
    case ErrorCode::NonRealSelection:
    case ErrorCode::NotASphereImage:
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::SingularBlock:
    case ErrorCode::PointAtInfinity:
      return kDegenerate;
    default:
      return kInput;
  }
}

struct SimulateArgs {
  std::string preset;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise_contour;
  std::optional<double> noise_intensity;
  std::string out;
  std::string format = "f32";
};

struct CalibrateArgs {
  std::string bundle;
  std::string out;
  std::optional<double> mu;
  int max_iters = 200;
  int stride = 0;
};

struct ReconstructArgs {
  std::string bundle;
  std::string calib;
  bool truth_calib = false;
  std::string out;
};

struct EvaluateArgs {
  std::string calib;
  std::string truth;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  SceneTruth truth;
  if (!a.config.empty()) {
    truth = scene_from_json(parse_json(io::read_text(a.config), a.config));
  } else {
    truth = scene_preset(a.preset.empty() ? "cppA" : a.preset);
  }
  if (a.seed) truth.noise.seed = *a.seed;
  if (a.noise_contour) truth.noise.contour_sigma = *a.noise_contour;
  if (a.noise_intensity) truth.noise.intensity_sigma = *a.noise_intensity;

  log("rendering scene '" + truth.name + "' with " + std::to_string(thread_count()) + " thread(s)");
  const SceneBundle bundle = render_scene(truth);
  const auto format = a.format == "pgm16" ? io::StackFormat::Pgm16 : io::StackFormat::Float32;
  io::write_bundle(a.out, bundle, format);
  log("bundle written to " + a.out);
  std::cout << "simulated " << truth.name << ": " << bundle.spheres.size() << " spheres, seed "
            << truth.noise.seed << ", camera f_x " << truth.k_c.fx << " px\n";
  return kOk;
}

int run_calibrate(const CalibrateArgs& a) {
  bool has_oracle = false;
  const SceneBundle bundle = io::read_bundle(a.bundle, &has_oracle);
  if (bundle.spheres.size() != 2) {
    std::cerr << "error: two sphere observations required (bundle has " << bundle.spheres.size() << ")\n";
    return kDegenerate;
  }
  AssemblyOptions assembly;
  assembly.stride = a.stride;
  log("decoding fringe stacks");
  const IscProblem problem = problem_from_bundle(bundle, assembly, a.mu);
  log("correspondences: " + std::to_string(problem.obs[0].x_c.size()) + " + " +
      std::to_string(problem.obs[1].x_c.size()));

  CalibOptions opts;
  opts.mu = a.mu;
  opts.max_iters = a.max_iters;
  const auto t0 = std::chrono::steady_clock::now();
  const CalibResult result = calibrate(problem, opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log("calibration finished in " + std::to_string(secs) + " s after " + std::to_string(result.iterations) +
      " iterations");

  Json j = to_json(result);
  std::string report;
  if (has_oracle) {
    const ErrorReport errors = evaluate_against_truth(result, bundle.truth);
    j["error_report"] = to_json(errors);
    report = errors.format();
  }
  const fs::path out = a.out.empty() ? fs::path(a.bundle) / "calib.json" : fs::path(a.out);
  io::write_text(out, dump(j));
  log("wrote " + out.string());

  char line[256];
  std::snprintf(line, sizeof line,
                "K_C: fx %.4f fy %.4f skew %.4f u0 %.4f v0 %.4f\nobjective %.6g px, constraint %.3g (%s), %s\n",
                result.k_c.fx, result.k_c.fy, result.k_c.skew, result.k_c.u0, result.k_c.v0, result.objective,
                result.constraint_residual, result.constraint_checked ? "checked" : "unchecked",
                result.converged ? "converged" : "not converged");
  std::cout << line << report;
  return kOk;
}

int run_reconstruct(const ReconstructArgs& a) {
  if (a.calib.empty() == !a.truth_calib) {
    std::cerr << "error: pass exactly one of --calib or --truth-calib\n";
    return kInput;
  }
  bool has_oracle = false;
  const SceneBundle bundle = io::read_bundle(a.bundle, &has_oracle);
  Intrinsics k_c;
  ProjMatrix m_p;
  if (a.truth_calib) {
    k_c = bundle.truth.k_c;
    m_p = bundle.truth.projector_matrix();
  } else {
    const StoredCalibration stored = calibration_from_json(parse_json(io::read_text(a.calib), a.calib));
    k_c = stored.k_c;
    m_p = stored.m_p;
  }
  const std::vector<SpherePose>* truth = has_oracle ? &bundle.truth.spheres : nullptr;
  log("triangulating");
  const PointCloud cloud = reconstruct_cloud(bundle, k_c, m_p, truth);
  const fs::path out = a.out.empty() ? fs::path(a.bundle) : fs::path(a.out);
  io::write_ply(out / "cloud.ply", cloud.points, cloud.error);
  io::write_text(out / "stats.json", dump(to_json(cloud.stats)));
  log("wrote " + (out / "cloud.ply").string());

  std::cout << "points " << cloud.stats.points << ", skipped " << cloud.stats.skipped << "\n";
  if (cloud.stats.has_truth) {
    char line[128];
    std::snprintf(line, sizeof line, "surface rmse %.6g (%.6g of radius)\n", cloud.stats.rmse,
                  cloud.stats.rmse_over_radius);
    std::cout << line;
  }
  return kOk;
}

int run_evaluate(const EvaluateArgs& a) {
  const StoredCalibration stored = calibration_from_json(parse_json(io::read_text(a.calib), a.calib));
  Json manifest = parse_json(io::read_text(a.truth), a.truth);
  // Accept a bundle manifest or a bare scene document.
  if (manifest.contains("scene")) manifest = manifest["scene"];
  const SceneTruth truth = scene_from_json(manifest);
  const ErrorReport report = evaluate_against_truth(stored.k_c, stored.projector, truth);
  if (!a.out.empty()) io::write_text(a.out, dump(to_json(report)));
  std::cout << report.format();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projector-camera calibration from two spheres"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "Suppress log output on stderr");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic scene bundle");
  simulate->add_option("--preset", sim.preset, "Built-in rig: cppA or cppB");
  simulate->add_option("--config", sim.config, "Scene JSON (overrides --preset)");
  simulate->add_option("--seed", sim.seed, "Noise seed");
  simulate->add_option("--noise-contour", sim.noise_contour, "Contour noise sigma, px");
  simulate->add_option("--noise-intensity", sim.noise_intensity, "Intensity noise sigma");
  simulate->add_option("--format", sim.format, "Stack format")->check(CLI::IsMember({"f32", "pgm16"}));
  simulate->add_option("--out", sim.out, "Bundle directory")->required();
  simulate->add_flag("--quiet", g_quiet);

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate the rig from a bundle");
  calibrate_cmd->add_option("bundle", cal.bundle, "Bundle directory")->required();
  calibrate_cmd->add_option("--out", cal.out, "Output calib.json (default: <bundle>/calib.json)");
  calibrate_cmd->add_option("--mu", cal.mu, "Constraint penalty weight; 0 disables it")
      ->check(CLI::NonNegativeNumber);
  calibrate_cmd->add_option("--max-iters", cal.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  calibrate_cmd->add_option("--stride", cal.stride, "Interior sampling stride in px (0 = auto)")
      ->check(CLI::NonNegativeNumber);
  calibrate_cmd->add_flag("--quiet", g_quiet);

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Triangulate the bundle into a point cloud");
  reconstruct->add_option("bundle", rec.bundle, "Bundle directory")->required();
  reconstruct->add_option("--calib", rec.calib, "calib.json");
  reconstruct->add_flag("--truth-calib", rec.truth_calib, "Use the ground-truth calibration from the manifest");
  reconstruct->add_option("--out", rec.out, "Output directory (default: bundle)");
  reconstruct->add_flag("--quiet", g_quiet);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compare a calibration with ground truth");
  evaluate->add_option("--calib", ev.calib, "calib.json")->required();
  evaluate->add_option("--truth", ev.truth, "Bundle manifest or scene JSON")->required();
  evaluate->add_option("--out", ev.out, "Write the report as JSON");
  evaluate->add_flag("--quiet", g_quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*calibrate_cmd) return run_calibrate(cal);
    if (*reconstruct) return run_reconstruct(rec);
    if (*evaluate) return run_evaluate(ev);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
