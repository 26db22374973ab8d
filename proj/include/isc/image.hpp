#pragma once

#include <cstddef>
#include <vector>

namespace isc {

/// Dense row-major single-channel image.
template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> pixels;

  Image() = default;
  Image(int w, int h, T fill = T{})
      : width(w), height(h), pixels(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

  size_t size() const { return pixels.size(); }
  T& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

using ImageF = Image<float>;
using ImageD = Image<double>;

}  // namespace isc
