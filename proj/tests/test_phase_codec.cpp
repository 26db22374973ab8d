#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isc/error.hpp"
#include "isc/phase_codec.hpp"
#include "test_support.hpp"

using namespace isc;
using namespace isc::test;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hand-written fringe model, kept apart from the library's.
double fringe(double u, double f, int k, int n, int extent, double a = 0.5, double b = 0.5) {
  return a + b * std::cos(kTwoPi * f * u / extent - kTwoPi * k / n);
}

// One-row stack sampling the fringe ladder at the given coordinates.
std::vector<ImageD> row_stack(const std::vector<double>& us, const FringeConfig& cfg) {
  std::vector<ImageD> stack;
  for (double f : cfg.freqs) {
    for (int k = 0; k < cfg.steps; ++k) {
      ImageD img(static_cast<int>(us.size()), 1);
      for (size_t i = 0; i < us.size(); ++i) img.pixels[i] = fringe(us[i], f, k, cfg.steps, cfg.coded_extent());
      stack.push_back(std::move(img));
    }
  }
  return stack;
}

std::vector<ImageD> single_pixel(std::initializer_list<double> values) {
  std::vector<ImageD> stack;
  for (double v : values) stack.emplace_back(1, 1, v);
  return stack;
}

double wrap(double phi) {
  const double w = std::fmod(phi, kTwoPi);
  return w < 0 ? w + kTwoPi : w;
}

double circular_distance(double a, double b) {
  const double d = wrap(a - b);
  return std::min(d, kTwoPi - d);
}

}  // namespace

TEST_CASE("pattern values for the four-step examples") {
  const double u0[] = {1.0, 0.5, 0.0, 0.5};
  const double u1[] = {0.5, 1.0, 0.5, 0.0};
  for (int k = 0; k < 4; ++k) {
    CHECK(pattern_value(0.0, 1.0, k, 4, 4) == doctest::Approx(u0[k]).epsilon(1e-15));
    CHECK(pattern_value(1.0, 1.0, k, 4, 4) == doctest::Approx(u1[k]).epsilon(1e-15));
  }
}

TEST_CASE("render_patterns layout") {
  FringeConfig cfg{4, {1.0, 8.0}, 16, 8, Orientation::Horizontal};
  const auto pats = render_patterns(cfg);
  REQUIRE(pats.size() == 8);
  CHECK(pats[0].width == 16);
  CHECK(pats[0].height == 8);
  // Horizontal fringes vary along y only.
  CHECK(pats[5].at(0, 3) == pats[5].at(15, 3));
  CHECK(pats[5].at(0, 3) == doctest::Approx(fringe(3.0, 8.0, 1, 4, 8)));
}

TEST_CASE("decode_wrapped: four-step examples") {
  {
    const auto stack = single_pixel({1.0, 0.5, 0.0, 0.5});
    const auto w = decode_wrapped<double>(stack);
    CHECK(w.phase[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.modulation[0] == doctest::Approx(0.5));
  }
  {
    const auto stack = single_pixel({0.5, 1.0, 0.5, 0.0});
    const auto w = decode_wrapped<double>(stack);
    CHECK(w.phase[0] == doctest::Approx(std::numbers::pi / 2));
    CHECK(w.modulation[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("decode_wrapped: random phases, amplitudes and step counts") {
  Rng rng(99);
  for (int n : {3, 4, 8}) {
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const double phi = uniform(rng, 0.0, kTwoPi);
      const double a = uniform(rng, 1e-3, 1.0);
      const double b = uniform(rng, 1e-3, 1.0);
      std::vector<ImageD> stack;
      for (int k = 0; k < n; ++k) stack.emplace_back(1, 1, a + b * std::cos(phi - kTwoPi * k / n));
      const auto w = decode_wrapped<double>(stack);
      worst = std::max(worst, circular_distance(w.phase[0], phi));
      CHECK(w.modulation[0] == doctest::Approx(b).epsilon(1e-10));
      CHECK(w.phase[0] >= 0.0);
      CHECK(w.phase[0] < kTwoPi);
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("decode_wrapped: three-step render-decode across the projector") {
  const FringeConfig cfg{3, {8.0}, 854, 480, Orientation::Vertical};
  std::vector<double> us;
  for (int i = 0; i < 8540; ++i) us.push_back(i * 0.1);
  const auto stack = row_stack(us, cfg);
  const auto w = decode_wrapped<double>(stack);
  double worst = 0.0;
  for (size_t i = 0; i < us.size(); ++i) worst = std::max(worst, circular_distance(w.phase[i], wrap(kTwoPi * 8.0 * us[i] / 854.0)));
  CHECK(worst < 1e-10);
}

TEST_CASE("decode is invariant to gain and offset") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const double phi = uniform(rng, 0.0, kTwoPi);
    std::vector<ImageD> base, scaled;
    const double a = uniform(rng, -3.0, 3.0);
    const double b = uniform(rng, 0.01, 50.0);
    for (int k = 0; k < 5; ++k) {
      const double v = 0.5 + 0.4 * std::cos(phi - kTwoPi * k / 5);
      base.emplace_back(1, 1, v);
      scaled.emplace_back(1, 1, a + b * v);
    }
    CHECK(circular_distance(decode_wrapped<double>(base).phase[0], decode_wrapped<double>(scaled).phase[0]) < 1e-12);
  }
}

TEST_CASE("decode_wrapped errors") {
  const auto two = single_pixel({1.0, 0.5});
  CHECK_THROWS_AS(decode_wrapped<double>(two), Error);
  std::vector<ImageD> mixed{ImageD(2, 2), ImageD(2, 2), ImageD(3, 2)};
  try {
    decode_wrapped<double>(mixed);
    FAIL("mismatched sizes accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("unwrap_temporal: exact rung") {
  const std::vector<double> low{kTwoPi * 0.3};
  const std::vector<double> high{wrap(kTwoPi * 8.0 * 0.3)};
  const auto out = unwrap_temporal(low, high, 8.0);
  CHECK(std::abs(out[0] - 4.8 * std::numbers::pi) < 1e-10);
}

TEST_CASE("unwrap_temporal: noiseless sweeps have no order errors") {
  for (double ratio : {4.0, 8.0}) {
    std::vector<double> low, high, truth;
    for (int i = 0; i < 100000; ++i) {
      const double u = (i + 0.5) / 100000.0;
      low.push_back(kTwoPi * u);
      truth.push_back(kTwoPi * ratio * u);
      high.push_back(wrap(truth.back()));
    }
    const auto out = unwrap_temporal(low, high, ratio);
    int errors = 0;
    for (size_t i = 0; i < out.size(); ++i) errors += std::abs(out[i] - truth[i]) > 1e-9;
    CHECK(errors == 0);
  }
}

TEST_CASE("unwrap_temporal: intensity noise rarely flips the order") {
  // Exercises one rung (8 -> 64): the low phase is noisy but carries the right
  // fringe order, as it would after a correct lower rung.
  const int n = 200000;
  const int extent = 854;
  std::vector<double> us;
  for (int i = 0; i < n; ++i) us.push_back((i + 0.5) * extent / n);
  Rng rng(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  auto noisy_wrapped = [&](double f) {
    const FringeConfig cfg{4, {f}, extent, 1, Orientation::Vertical};
    auto stack = row_stack(us, cfg);
    for (auto& img : stack) {
      for (auto& v : img.pixels) v += noise(rng);
    }
    return decode_wrapped<double>(stack).phase;
  };
  const auto w8 = noisy_wrapped(8.0);
  const auto w64 = noisy_wrapped(64.0);
  std::vector<double> low(n);
  for (int i = 0; i < n; ++i) {
    const double truth = kTwoPi * 8.0 * us[static_cast<size_t>(i)] / extent;
    low[static_cast<size_t>(i)] = w8[static_cast<size_t>(i)] + kTwoPi * std::round((truth - w8[static_cast<size_t>(i)]) / kTwoPi);
  }
  const auto out = unwrap_temporal(low, w64, 8.0);
  int order_errors = 0;
  for (int i = 0; i < n; ++i) {
    order_errors += std::abs(out[static_cast<size_t>(i)] - kTwoPi * 64.0 * us[static_cast<size_t>(i)] / extent) > std::numbers::pi;
  }
  CHECK(order_errors < n / 1000);
}

TEST_CASE("phase_to_proj_coord") {
  CHECK(phase_to_proj_coord(0.0, 8.0, 854) == 0.0);
  CHECK(phase_to_proj_coord(kTwoPi * 8.0, 8.0, 854) == doctest::Approx(854.0).epsilon(1e-15));
  CHECK_THROWS_AS(phase_to_proj_coord(-0.1, 8.0, 854), Error);
  CHECK_THROWS_AS(phase_to_proj_coord(kTwoPi * 8.0 + 1e-6, 8.0, 854), Error);
}

TEST_CASE("full ladder: projector coordinate 427 is recovered") {
  const FringeConfig cfg{4, {1.0, 8.0, 64.0}, 854, 480, Orientation::Vertical};
  const auto stack = row_stack({427.0}, cfg);
  const PhaseMap map = decode_ladder<double>(stack, cfg);
  REQUIRE(map.valid(0, 0));
  CHECK(std::abs(phase_to_proj_coord(map.at(0, 0), 64.0, 854) - 427.0) < 1e-6);
}

TEST_CASE("full ladder: identity on a dense sweep, both orientations") {
  for (auto orientation : {Orientation::Vertical, Orientation::Horizontal}) {
    for (int n : {3, 4, 8}) {
      const FringeConfig cfg{n, {1.0, 8.0, 64.0}, 854, 480, orientation};
      const int extent = cfg.coded_extent();
      std::vector<double> us;
      for (int i = 0; i < 10000; ++i) us.push_back((i + 0.5) * extent / 10000.0);
      const PhaseMap map = decode_ladder<double>(row_stack(us, cfg), cfg);
      double worst = 0.0;
      bool increasing = true;
      for (size_t i = 0; i < us.size(); ++i) {
        REQUIRE(map.mask[i]);
        worst = std::max(worst, std::abs(phase_to_proj_coord(map.phase[i], 64.0, extent) - us[i]));
        if (i > 0 && !(map.phase[i] > map.phase[i - 1])) increasing = false;
      }
      CHECK(worst < 1e-6);
      CHECK(increasing);
    }
  }
}

TEST_CASE("modulation threshold masks flat pixels") {
  const FringeConfig cfg{4, {1.0, 8.0}, 854, 480, Orientation::Vertical};
  auto stack = row_stack({100.0, 200.0}, cfg);
  for (auto& img : stack) img.pixels[1] = 0.3;  // unlit pixel
  const PhaseMap map = decode_ladder<double>(stack, cfg);
  CHECK(map.valid(0, 0));
  CHECK_FALSE(map.valid(1, 0));
  CHECK(map.modulation[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fringe config validation") {
  CHECK_NOTHROW(FringeConfig{}.validate());
  CHECK_THROWS_AS((FringeConfig{2, {1.0}, 854, 480, Orientation::Vertical}.validate()), Error);
  CHECK_THROWS_AS((FringeConfig{4, {1.0, 16.0}, 854, 480, Orientation::Vertical}.validate()), Error);
  CHECK_THROWS_AS((FringeConfig{4, {8.0, 1.0}, 854, 480, Orientation::Vertical}.validate()), Error);
  const auto stack = row_stack({1.0}, FringeConfig{});
  FringeConfig two_rungs{4, {1.0, 8.0}, 854, 480, Orientation::Vertical};
  CHECK_THROWS_AS(decode_ladder<double>(stack, two_rungs), Error);
}

TEST_CASE("decode kernels match their serial references bit for bit") {
  const FringeConfig cfg{4, {1.0, 8.0, 64.0}, 854, 480, Orientation::Vertical};
  std::vector<double> us;
  for (int i = 0; i < 50000; ++i) us.push_back(i * 854.0 / 50000.0);
  auto stack = row_stack(us, cfg);
  std::vector<ImageF> stack_f;
  for (const auto& img : stack) {
    ImageF f(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) f.pixels[i] = static_cast<float>(img.pixels[i]);
    stack_f.push_back(std::move(f));
  }
  const std::span<const ImageF> first(stack_f.data(), 4);
  const auto par = decode_wrapped<float>(first);
  const auto ser = reference::decode_wrapped<float>(first);
  CHECK(par.phase == ser.phase);
  CHECK(par.modulation == ser.modulation);

  const std::span<const ImageF> second(stack_f.data() + 4, 4);
  const auto high = decode_wrapped<float>(second);
  CHECK(unwrap_temporal(par.phase, high.phase, 8.0) == reference::unwrap_temporal(par.phase, high.phase, 8.0));
}
