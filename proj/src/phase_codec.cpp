#include "isc/phase_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "isc/error.hpp"
#include "isc/parallel.hpp"

namespace isc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <typename T>
void check_stack(std::span<const Image<T>> stack) {
  if (stack.size() < 3) throw Error(ErrorCode::InvalidInput, "phase stack needs at least 3 images");
  for (const auto& img : stack) {
    if (!img.same_shape(stack.front())) {
      throw Error(ErrorCode::DimensionMismatch, "phase stack images differ in size");
    }
  }
}

// Per-pixel estimator shared by the serial and parallel kernels.
template <typename T>
inline void decode_pixel(std::span<const Image<T>> stack, std::span<const double> cosines,
                         std::span<const double> sines, size_t idx, double& phase, double& mod) {
  double s = 0.0, c = 0.0;
  for (size_t k = 0; k < stack.size(); ++k) {
    const double v = static_cast<double>(stack[k].pixels[idx]);
    s += v * sines[k];
    c += v * cosines[k];
  }
  double phi = std::atan2(s, c);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi -= kTwoPi;
  phase = phi;
  mod = 2.0 / static_cast<double>(stack.size()) * std::hypot(s, c);
}

inline double unwrap_pixel(double low, double high, double ratio) {
  const double order = std::round((ratio * low - high) / kTwoPi);
  return high + kTwoPi * order;
}

void shift_tables(size_t n, std::vector<double>& cosines, std::vector<double>& sines) {
  cosines.resize(n);
  sines.resize(n);
  for (size_t k = 0; k < n; ++k) {
    const double d = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    cosines[k] = std::cos(d);
    sines[k] = std::sin(d);
  }
}

}  // namespace

void FringeConfig::validate() const {
  if (steps < 3) throw Error(ErrorCode::InvalidInput, "fringe steps must be >= 3");
  if (proj_w < 1 || proj_h < 1) throw Error(ErrorCode::InvalidInput, "projector size must be positive");
  if (freqs.empty()) throw Error(ErrorCode::InvalidInput, "frequency ladder is empty");
  if (!(freqs.front() > 0.0)) throw Error(ErrorCode::InvalidInput, "frequencies must be positive");
  for (size_t i = 1; i < freqs.size(); ++i) {
    if (!(freqs[i] > freqs[i - 1])) {
      throw Error(ErrorCode::InvalidInput, "frequencies must be strictly increasing");
    }
    if (freqs[i] / freqs[i - 1] > kMaxFrequencyRatio) {
      throw Error(ErrorCode::InvalidInput, "frequency ratio exceeds 8 between rungs " +
                                               std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
}

double pattern_value(double u, double freq, int step, int steps, int extent) {
  return 0.5 + 0.5 * std::cos(kTwoPi * freq * u / extent - kTwoPi * step / steps);
}

std::vector<ImageD> render_patterns(const FringeConfig& cfg) {
  cfg.validate();
  std::vector<ImageD> out;
  const int extent = cfg.coded_extent();
  for (double f : cfg.freqs) {
    for (int k = 0; k < cfg.steps; ++k) {
      ImageD img(cfg.proj_w, cfg.proj_h);
      for (int y = 0; y < cfg.proj_h; ++y) {
        for (int x = 0; x < cfg.proj_w; ++x) {
          const int u = cfg.orientation == Orientation::Vertical ? x : y;
          img.at(x, y) = pattern_value(u, f, k, cfg.steps, extent);
        }
      }
      out.push_back(std::move(img));
    }
  }
  return out;
}

template <typename T>
WrappedPhase decode_wrapped(std::span<const Image<T>> stack) {
  check_stack(stack);
  std::vector<double> cosines, sines;
  shift_tables(stack.size(), cosines, sines);
  WrappedPhase out{stack.front().width, stack.front().height, {}, {}};
  const size_t n = stack.front().size();
  out.phase.resize(n);
  out.modulation.resize(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<size_t>(i);
    decode_pixel(stack, cosines, sines, idx, out.phase[idx], out.modulation[idx]);
  }
  return out;
}

std::vector<double> unwrap_temporal(std::span<const double> low, std::span<const double> high,
                                    double ratio) {
  if (low.size() != high.size()) throw Error(ErrorCode::DimensionMismatch, "phase maps differ in size");
  std::vector<double> out(low.size());
  const auto count = static_cast<long>(low.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long i = 0; i < count; ++i) {
    const auto idx = static_cast<size_t>(i);
    out[idx] = unwrap_pixel(low[idx], high[idx], ratio);
  }
  return out;
}

template <typename T>
PhaseMap decode_ladder(std::span<const Image<T>> stack, const FringeConfig& cfg,
                       double modulation_threshold) {
  cfg.validate();
  const auto steps = static_cast<size_t>(cfg.steps);
  if (stack.size() != steps * cfg.freqs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "stack size does not match the fringe ladder");
  }
  PhaseMap out;
  std::vector<double> absolute;
  for (size_t i = 0; i < cfg.freqs.size(); ++i) {
    WrappedPhase w = decode_wrapped(stack.subspan(i * steps, steps));
    if (i == 0) {
      out.width = w.width;
      out.height = w.height;
      absolute = std::move(w.phase);
      out.modulation = std::move(w.modulation);
      continue;
    }
    absolute = unwrap_temporal(absolute, w.phase, cfg.freqs[i] / cfg.freqs[i - 1]);
    for (size_t p = 0; p < absolute.size(); ++p) {
      out.modulation[p] = std::min(out.modulation[p], w.modulation[p]);
    }
  }
  out.phase = std::move(absolute);
  out.mask.resize(out.phase.size());
  for (size_t p = 0; p < out.phase.size(); ++p) {
    out.mask[p] = out.modulation[p] >= modulation_threshold ? 1 : 0;
  }
  return out;
}

double phase_to_proj_coord(double phase, double freq, int extent) {
  if (!(phase >= 0.0) || phase > kTwoPi * freq) {
    throw Error(ErrorCode::OutOfRange, "phase outside [0, 2 pi f]");
  }
  return extent * phase / (kTwoPi * freq);
}

namespace reference {

template <typename T>
WrappedPhase decode_wrapped(std::span<const Image<T>> stack) {
  check_stack(stack);
  std::vector<double> cosines, sines;
  shift_tables(stack.size(), cosines, sines);
  WrappedPhase out{stack.front().width, stack.front().height, {}, {}};
  out.phase.resize(stack.front().size());
  out.modulation.resize(stack.front().size());
  for (size_t idx = 0; idx < out.phase.size(); ++idx) {
    decode_pixel(stack, cosines, sines, idx, out.phase[idx], out.modulation[idx]);
  }
  return out;
}

std::vector<double> unwrap_temporal(std::span<const double> low, std::span<const double> high,
                                    double ratio) {
  if (low.size() != high.size()) throw Error(ErrorCode::DimensionMismatch, "phase maps differ in size");
  std::vector<double> out;
  out.reserve(low.size());
  for (size_t i = 0; i < low.size(); ++i) out.push_back(unwrap_pixel(low[i], high[i], ratio));
  return out;
}

template WrappedPhase decode_wrapped<float>(std::span<const Image<float>>);
template WrappedPhase decode_wrapped<double>(std::span<const Image<double>>);

}  // namespace reference

template WrappedPhase decode_wrapped<float>(std::span<const Image<float>>);
template WrappedPhase decode_wrapped<double>(std::span<const Image<double>>);
template PhaseMap decode_ladder<float>(std::span<const Image<float>>, const FringeConfig&, double);
template PhaseMap decode_ladder<double>(std::span<const Image<double>>, const FringeConfig&, double);

}  // namespace isc
