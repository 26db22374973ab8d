#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isc/image.hpp"

namespace isc {

enum class Orientation {
  Vertical,   ///< fringes are vertical lines; codes the projector x axis
  Horizontal  ///< codes the projector y axis
};

/// N-step phase-shifting setup for one projector axis. Frequencies are whole
/// fringe counts across the coded axis, lowest first.
struct FringeConfig {
  int steps = 4;
  std::vector<double> freqs{1.0, 8.0, 64.0};
  int proj_w = 854;
  int proj_h = 480;
  Orientation orientation = Orientation::Vertical;

  /// Resolution along the coded axis.
  int coded_extent() const { return orientation == Orientation::Vertical ? proj_w : proj_h; }
  double top_frequency() const { return freqs.back(); }
  /// Throws InvalidInput unless steps >= 3, freqs strictly increasing and
  /// consecutive ratios <= 8.
  void validate() const;
};

inline constexpr double kMaxFrequencyRatio = 8.0;
inline constexpr double kDefaultModulationThreshold = 0.05;

/// Pattern value 0.5 + 0.5 cos(2 pi f u / W - 2 pi k / N) at a continuous
/// projector coordinate u along the coded axis.
double pattern_value(double u, double freq, int step, int steps, int extent);

/// Full projector pattern set, ordered frequency-major then step.
std::vector<ImageD> render_patterns(const FringeConfig& cfg);

struct WrappedPhase {
  int width = 0;
  int height = 0;
  std::vector<double> phase;       ///< [0, 2 pi)
  std::vector<double> modulation;  ///< B
};

/// Absolute phase per pixel plus validity.
struct PhaseMap {
  int width = 0;
  int height = 0;
  std::vector<double> phase;
  std::vector<double> modulation;  ///< smallest B over the frequency ladder
  std::vector<std::uint8_t> mask;  ///< 1 where valid

  bool valid(int x, int y) const { return mask[static_cast<size_t>(y) * width + x] != 0; }
  double at(int x, int y) const { return phase[static_cast<size_t>(y) * width + x]; }
};

/// Standard N-step estimator, phi = atan2(sum I_k sin d_k, sum I_k cos d_k)
/// mapped to [0, 2 pi), B = (2/N) |sum I_k e^{i d_k}|. Throws
/// DimensionMismatch / InvalidInput.
template <typename T>
WrappedPhase decode_wrapped(std::span<const Image<T>> stack);

/// One temporal unwrapping rung. `low` holds absolute phase at f_lo, `high`
/// wrapped phase at f_hi = ratio * f_lo.
std::vector<double> unwrap_temporal(std::span<const double> low, std::span<const double> high,
                                    double ratio);

/// Decodes a whole ladder stack (frequency-major, cfg.steps images per
/// frequency) into absolute phase at the top frequency.
template <typename T>
PhaseMap decode_ladder(std::span<const Image<T>> stack, const FringeConfig& cfg,
                       double modulation_threshold = kDefaultModulationThreshold);

/// x_p = W phi / (2 pi f). Throws OutOfRange outside [0, 2 pi f].
double phase_to_proj_coord(double phase, double freq, int extent);

namespace reference {
template <typename T>
WrappedPhase decode_wrapped(std::span<const Image<T>> stack);
std::vector<double> unwrap_temporal(std::span<const double> low, std::span<const double> high,
                                    double ratio);
}  // namespace reference

}  // namespace isc
