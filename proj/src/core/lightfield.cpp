#include "isty/lightfield.hpp"

#include <cmath>
#include <string>

namespace isty {

LightField::LightField(int U, int V, int X, int Y, float fill)
    : U_(U), V_(V), X_(X), Y_(Y) {
  if (U <= 0 || V <= 0 || X <= 0 || Y <= 0) {
    throw ArgumentError("light field dimensions must be positive");
  }
  if (U % 2 == 0 || V % 2 == 0) {
    throw ArgumentError("angular size must be odd, got " + std::to_string(U) +
                        "x" + std::to_string(V));
  }
  data_.assign(static_cast<std::size_t>(U) * V * view_size(), fill);
}

ViewImage LightField::view(int u, int v) const {
  ViewImage img(X_, Y_);
  auto src = view_data(u, v);
  std::copy(src.begin(), src.end(), img.data().begin());
  return img;
}

void LightField::set_view(int u, int v, const ViewImage& img) {
  if (img.width() != X_ || img.height() != Y_) {
    throw ArgumentError("set_view: view size mismatch");
  }
  auto dst = view_data(u, v);
  std::copy(img.data().begin(), img.data().end(), dst.begin());
}

void LightField::validate() const {
  if (empty()) throw ArgumentError("empty light field");
  if (U_ % 2 == 0 || V_ % 2 == 0) throw ArgumentError("angular size must be odd");
  for (float s : data_) {
    if (!(s >= 0.0f && s <= 1.0f)) {
      throw ArgumentError("light field sample outside [0,1]");
    }
  }
}

StackedViews::StackedViews(int U, int V, int X, int Y)
    : U_(U), V_(V), X_(X), Y_(Y) {
  if (U <= 0 || V <= 0 || X <= 0 || Y <= 0) {
    throw ArgumentError("stack dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(3) * U * V * X * Y, 0.0f);
}

ViewImage center_view(const LightField& lf) {
  return lf.view(lf.center_u(), lf.center_v());
}

LightField central_crop_angular(const LightField& lf, int U, int V) {
  if (U <= 0 || V <= 0 || U % 2 == 0 || V % 2 == 0) {
    throw ArgumentError("central_crop_angular: target must be odd and positive");
  }
  if (U > lf.U() || V > lf.V()) {
    throw ArgumentError("central_crop_angular: target larger than source");
  }
  LightField out(U, V, lf.X(), lf.Y());
  out.bit_depth = lf.bit_depth;
  out.disparity_unit = lf.disparity_unit;
  const int du = (lf.U() - U) / 2;
  const int dv = (lf.V() - V) / 2;
  for (int v = 0; v < V; ++v) {
    for (int u = 0; u < U; ++u) {
      auto src = lf.view_data(u + du, v + dv);
      std::copy(src.begin(), src.end(), out.view_data(u, v).begin());
    }
  }
  return out;
}

StackedViews to_sai_stack(const LightField& lf) {
  StackedViews s(lf.U(), lf.V(), lf.X(), lf.Y());
  for (int v = 0; v < lf.V(); ++v)
    for (int u = 0; u < lf.U(); ++u) {
      const int base = 3 * (v * lf.U() + u);
      for (int y = 0; y < lf.Y(); ++y)
        for (int x = 0; x < lf.X(); ++x)
          for (int c = 0; c < 3; ++c) s.at(base + c, x, y) = lf.at(u, v, x, y, c);
    }
  return s;
}

LightField from_sai_stack(const StackedViews& s) {
  LightField lf(s.U(), s.V(), s.X(), s.Y());
  for (int v = 0; v < s.V(); ++v)
    for (int u = 0; u < s.U(); ++u) {
      const int base = 3 * (v * s.U() + u);
      for (int y = 0; y < s.Y(); ++y)
        for (int x = 0; x < s.X(); ++x)
          for (int c = 0; c < 3; ++c) lf.at(u, v, x, y, c) = s.at(base + c, x, y);
    }
  return lf;
}

float sample_bilinear(std::span<const float> plane, int width, int height,
                      int channels, int c, double x, double y) noexcept {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  auto clampi = [](double p, int n) {
    if (p < 0.0) return 0;
    if (p > n - 1) return n - 1;
    return static_cast<int>(p);
  };
  const int xa = clampi(fx0, width), xb = clampi(fx0 + 1.0, width);
  const int ya = clampi(fy0, height), yb = clampi(fy0 + 1.0, height);
  auto px = [&](int xi, int yi) -> double {
    return plane[(static_cast<std::size_t>(yi) * width + xi) * channels + c];
  };
  const double top = px(xa, ya) + fx * (px(xb, ya) - px(xa, ya));
  const double bot = px(xa, yb) + fx * (px(xb, yb) - px(xa, yb));
  return static_cast<float>(top + fy * (bot - top));
}

LightField reparameterize(const LightField& lf, double d) {
  if (!std::isfinite(d)) throw ArgumentError("reparameterize: disparity must be finite");
  LightField out(lf.U(), lf.V(), lf.X(), lf.Y());
  out.bit_depth = lf.bit_depth;
  out.disparity_unit = lf.disparity_unit;
  for (int v = 0; v < lf.V(); ++v) {
    for (int u = 0; u < lf.U(); ++u) {
      auto src = lf.view_data(u, v);
      auto dst = out.view_data(u, v);
      const double sx = angular_offset_u(lf, u) * d;
      const double sy = angular_offset_v(lf, v) * d;
      if (sx == 0.0 && sy == 0.0) {
        std::copy(src.begin(), src.end(), dst.begin());
        continue;
      }
      for (int y = 0; y < lf.Y(); ++y)
        for (int x = 0; x < lf.X(); ++x)
          for (int c = 0; c < 3; ++c)
            dst[(static_cast<std::size_t>(y) * lf.X() + x) * 3 + c] =
                sample_bilinear(src, lf.X(), lf.Y(), 3, c, x + sx, y + sy);
    }
  }
  return out;
}

SampleValidity::SampleValidity(int U, int V, int X, int Y, double d)
    : U_(U), V_(V), X_(X), Y_(Y) {
  flags_.assign(static_cast<std::size_t>(U) * V * X * Y, 0);
  const int cu = (U - 1) / 2, cv = (V - 1) / 2;
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < U; ++u) {
      const double sx = (u - cu) * d, sy = (v - cv) * d;
      for (int y = 0; y < Y; ++y) {
        const double py = y + sy;
        const bool vy = py >= 0.0 && py <= Y - 1;
        for (int x = 0; x < X; ++x) {
          const double px = x + sx;
          const bool vx = px >= 0.0 && px <= X - 1;
          flags_[((static_cast<std::size_t>(v) * U + u) * Y + y) * X + x] = vx && vy;
        }
      }
    }
}

namespace {

double corner_aligned(int dst, int dst_n, int src_n) {
  if (dst_n == 1) return (src_n - 1) / 2.0;
  return static_cast<double>(dst) * (src_n - 1) / (dst_n - 1);
}

}  // namespace

ViewImage resize_image(const ViewImage& img, int width, int height) {
  if (width <= 0 || height <= 0) throw ArgumentError("resize: nonpositive target");
  if (width == img.width() && height == img.height()) return img;
  ViewImage out(width, height);
  for (int y = 0; y < height; ++y) {
    const double sy = corner_aligned(y, height, img.height());
    for (int x = 0; x < width; ++x) {
      const double sx = corner_aligned(x, width, img.width());
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) =
            sample_bilinear(img.data(), img.width(), img.height(), 3, c, sx, sy);
    }
  }
  return out;
}

LightField resize_spatial(const LightField& lf, int X, int Y) {
  if (X <= 0 || Y <= 0) throw ArgumentError("resize_spatial: nonpositive target");
  if (X == lf.X() && Y == lf.Y()) return lf;
  LightField out(lf.U(), lf.V(), X, Y);
  out.bit_depth = lf.bit_depth;
  out.disparity_unit = lf.disparity_unit;
  for (int v = 0; v < lf.V(); ++v)
    for (int u = 0; u < lf.U(); ++u) out.set_view(u, v, resize_image(lf.view(u, v), X, Y));
  return out;
}

}  // namespace isty
