#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace isc {

/// Name recorded in bundle manifests.
inline constexpr std::string_view kNoiseGenerator = "splitmix64-counter/box-muller";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Standard normal draw addressed by (seed, stream, index). Stateless, so any
/// evaluation order gives the same values.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream ^ splitmix64(index)));
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(key ^ 0xd1b54a32d192ed03ULL);
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace isc
