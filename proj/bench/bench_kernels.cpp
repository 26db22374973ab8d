// Serial reference vs OpenMP timing for the hot kernels.
// Usage: bench_kernels [repeats]   (ISC_CALIB_THREADS caps the thread count)

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "isc/parallel.hpp"
#include "isc/phase_codec.hpp"
#include "isc/pipeline.hpp"
#include "isc/reconstruct.hpp"
#include "isc/sphere_pose.hpp"
#include "isc/synth_sim.hpp"

using namespace isc;

namespace {

// best of `repeats`, in milliseconds
double best_ms(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s %10.2f %10.2f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("threads %d (omp max %d), best of %d\n", thread_count(), omp_get_max_threads(), repeats);
  std::printf("%-14s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  SceneTruth truth = scene_preset("cppB");
  truth.noise = {0.5, 0.01, 1};

  SceneBundle a, b;
  const double rs = best_ms(repeats, [&] { a = reference::render_scene(truth); });
  const double rp = best_ms(repeats, [&] { b = render_scene(truth); });
  row("render", rs, rp, a.spheres[0].vertical.back().pixels == b.spheres[0].vertical.back().pixels);

  const auto& cap = b.spheres[0];
  const std::span<const ImageF> stack(cap.vertical.data() + 8, 4);
  WrappedPhase ws, wp;
  const double ds = best_ms(repeats, [&] { ws = reference::decode_wrapped<float>(stack); });
  const double dp = best_ms(repeats, [&] { wp = decode_wrapped<float>(stack); });
  row("decode", ds, dp, ws.phase == wp.phase);

  // unwrap on a long synthetic row
  const size_t n = 4'000'000;
  std::vector<double> low(n), high(n);
  for (size_t i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    low[i] = 2.0 * std::numbers::pi * 8.0 * u;
    high[i] = std::fmod(2.0 * std::numbers::pi * 64.0 * u, 2.0 * std::numbers::pi);
  }
  std::vector<double> us, up;
  const double us_ms = best_ms(repeats, [&] { us = reference::unwrap_temporal(low, high, 8.0); });
  const double up_ms = best_ms(repeats, [&] { up = unwrap_temporal(low, high, 8.0); });
  row("unwrap", us_ms, up_ms, us == up);

  const Conic conic = project_sphere_to_conic(truth.spheres[0], truth.k_c);
  const std::vector<Vec2> pixels = sample_interior_pixels(conic, 1);
  std::vector<std::optional<Vec3>> ls, lp;
  const double lss = best_ms(repeats, [&] {
    ls = reference::lift_pixels(pixels, truth.k_c, truth.spheres[0], MissPolicy::ClampToTangent);
  });
  const double lps = best_ms(repeats, [&] {
    lp = lift_pixels(pixels, truth.k_c, truth.spheres[0], MissPolicy::ClampToTangent);
  });
  row("lift", lss, lps, ls == lp);

  const auto corrs = decoded_correspondences(decode_capture(cap, truth));
  const ProjMatrix m = truth.projector_matrix();
  std::vector<std::optional<Vec3>> ts, tp;
  const double tss = best_ms(repeats, [&] { ts = reference::triangulate_all(corrs, truth.k_c, m); });
  const double tps = best_ms(repeats, [&] { tp = triangulate_all(corrs, truth.k_c, m); });
  row("triangulate", tss, tps, ts == tp);
  return 0;
}
