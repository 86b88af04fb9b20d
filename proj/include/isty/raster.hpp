#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isty/error.hpp"

namespace isty {

/// Interleaved float image, row-major with x fastest.  `width` is the X
/// (horizontal) extent and `height` the Y extent.
template <int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;
  Raster(int width, int height, float fill = 0.0f)
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
      throw ArgumentError("raster dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  float& at(int x, int y, int c = 0) noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }
  float at(int x, int y, int c = 0) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Raster& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// One RGB view of a light field, values in [0,1].
using ViewImage = Raster<3>;

/// Per-pixel occlusion probability: 0 = occluded, 1 = background.
class SoftMask : public Raster<1> {
 public:
  using Raster<1>::Raster;
  explicit SoftMask(Raster<1> r) : Raster<1>(std::move(r)) {}

  void clamp() noexcept {
    for (float& v : data()) v = std::clamp(v, 0.0f, 1.0f);
  }
};

template <int C>
void require_same_shape(const Raster<C>& a, const Raster<C>& b,
                        const char* what) {
  if (!a.same_shape(b)) {
    throw ArgumentError(std::string(what) + ": shape mismatch");
  }
}

template <int A, int B>
void require_same_extent(const Raster<A>& a, const Raster<B>& b,
                         const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ArgumentError(std::string(what) + ": spatial size mismatch");
  }
}

}  // namespace isty
