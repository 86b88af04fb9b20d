#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isty/raster.hpp"

namespace isty {

/// 5-D radiance array indexed (u, v, x, y, c).  The U x V grid of views is
/// stored view by view (v outer, u inner); each view is an interleaved RGB
/// image.  U and V are odd so the center view is well defined.
class LightField {
 public:
  LightField() = default;
  LightField(int U, int V, int X, int Y, float fill = 0.0f);

  int U() const noexcept { return U_; }
  int V() const noexcept { return V_; }
  int X() const noexcept { return X_; }
  int Y() const noexcept { return Y_; }
  bool empty() const noexcept { return data_.empty(); }

  int center_u() const noexcept { return (U_ - 1) / 2; }
  int center_v() const noexcept { return (V_ - 1) / 2; }

  std::size_t view_size() const noexcept {
    return static_cast<std::size_t>(X_) * Y_ * 3;
  }

  float& at(int u, int v, int x, int y, int c) noexcept {
    return data_[offset(u, v) + (static_cast<std::size_t>(y) * X_ + x) * 3 + c];
  }
  float at(int u, int v, int x, int y, int c) const noexcept {
    return data_[offset(u, v) + (static_cast<std::size_t>(y) * X_ + x) * 3 + c];
  }

  std::span<float> view_data(int u, int v) noexcept {
    return {data_.data() + offset(u, v), view_size()};
  }
  std::span<const float> view_data(int u, int v) const noexcept {
    return {data_.data() + offset(u, v), view_size()};
  }

  ViewImage view(int u, int v) const;
  void set_view(int u, int v, const ViewImage& img);

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  /// Throws ArgumentError if U/V are even or any sample is outside [0,1].
  void validate() const;

  bool same_shape(const LightField& o) const noexcept {
    return U_ == o.U_ && V_ == o.V_ && X_ == o.X_ && Y_ == o.Y_;
  }

  bool operator==(const LightField& o) const {
    return same_shape(o) && data_ == o.data_;
  }

  /// Code depth of the source images (8 or 16).  Informational.
  int bit_depth = 8;
  /// Pixels of shift per unit angular step for unit disparity. Informational.
  double disparity_unit = 1.0;

 private:
  std::size_t offset(int u, int v) const noexcept {
    return (static_cast<std::size_t>(v) * U_ + u) * view_size();
  }

  int U_ = 0, V_ = 0, X_ = 0, Y_ = 0;
  std::vector<float> data_;
};

/// Views concatenated along channels: channel 3*(v*U+u)+c, planar layout
/// [channel][y][x].
class StackedViews {
 public:
  StackedViews() = default;
  StackedViews(int U, int V, int X, int Y);

  int U() const noexcept { return U_; }
  int V() const noexcept { return V_; }
  int X() const noexcept { return X_; }
  int Y() const noexcept { return Y_; }
  int channels() const noexcept { return 3 * U_ * V_; }

  float& at(int channel, int x, int y) noexcept {
    return data_[(static_cast<std::size_t>(channel) * Y_ + y) * X_ + x];
  }
  float at(int channel, int x, int y) const noexcept {
    return data_[(static_cast<std::size_t>(channel) * Y_ + y) * X_ + x];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

 private:
  int U_ = 0, V_ = 0, X_ = 0, Y_ = 0;
  std::vector<float> data_;
};

ViewImage center_view(const LightField& lf);

LightField central_crop_angular(const LightField& lf, int U, int V);

StackedViews to_sai_stack(const LightField& lf);
LightField from_sai_stack(const StackedViews& stack);

/// Center-relative angular offset of view (u, v).
inline int angular_offset_u(const LightField& lf, int u) { return u - lf.center_u(); }
inline int angular_offset_v(const LightField& lf, int v) { return v - lf.center_v(); }

/// L_d(x, y, u, v) = L(x + du*d, y + dv*d, u, v) with (du, dv) measured from
/// the center view.  Fractional positions are bilinear; positions outside the
/// frame replicate the nearest edge sample (see sample_validity).
LightField reparameterize(const LightField& lf, double d);

/// Per-view flags for reparameterize(lf, d): 1 where the sampling position
/// falls inside the source frame, 0 where edge replication was used.
/// Layout [v][u][y][x].
class SampleValidity {
 public:
  SampleValidity(int U, int V, int X, int Y, double d);

  bool valid(int u, int v, int x, int y) const noexcept {
    return flags_[((static_cast<std::size_t>(v) * U_ + u) * Y_ + y) * X_ + x] != 0;
  }

 private:
  int U_, V_, X_, Y_;
  std::vector<std::uint8_t> flags_;
};

/// Bilinear resize of every view to X' x Y' (corner-aligned sampling, so the
/// first and last pixel centers map onto each other).
LightField resize_spatial(const LightField& lf, int X, int Y);

/// Bilinear sample of one channel with edge replication.  `a + f*(b-a)`
/// form keeps constants and integer positions exact.
float sample_bilinear(std::span<const float> plane, int width, int height,
                      int channels, int c, double x, double y) noexcept;

ViewImage resize_image(const ViewImage& img, int width, int height);

}  // namespace isty
