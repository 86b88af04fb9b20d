#pragma once

#include "isty/lightfield.hpp"
#include "isty/synthetic.hpp"

namespace isty::testing {

/// Textured background at disparity -1 with a textured square at +2 whose
/// center-view footprint is [sx0, sx0+side) x [sy0, sy0+side).  Rendered
/// pixel by pixel from the disparity definition (view (du,dv) shows the
/// plane content from x - du*d).
struct TwoPlaneScene {
  LightField lf;
  int sx0, sy0, side;
  double bg_d = -1.0, fg_d = 2.0;

  bool in_square(int x, int y) const {
    return x >= sx0 && x < sx0 + side && y >= sy0 && y < sy0 + side;
  }
};

inline TwoPlaneScene make_two_plane_scene(int X, int Y, int side, std::uint64_t seed) {
  TwoPlaneScene s{LightField(5, 5, X, Y), (X - side) / 2, (Y - side) / 2, side};
  const int m = 12;
  const ViewImage bg = value_noise(X + 2 * m, Y + 2 * m, seed, 2, 2);
  const ViewImage fg = value_noise(X + 2 * m, Y + 2 * m, seed + 1, 2, 2);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u) {
      const int du = u - 2, dv = v - 2;
      for (int y = 0; y < Y; ++y)
        for (int x = 0; x < X; ++x) {
          const int fx = x - static_cast<int>(du * s.fg_d), fy = y - static_cast<int>(dv * s.fg_d);
          const bool front = s.in_square(fx, fy);
          const int bx = x - static_cast<int>(du * s.bg_d), by = y - static_cast<int>(dv * s.bg_d);
          for (int c = 0; c < 3; ++c)
            s.lf.at(u, v, x, y, c) = front ? fg.at(fx + m, fy + m, c) : bg.at(bx + m, by + m, c);
        }
    }
  return s;
}

/// Textured rectangles at integer disparities over a textured background,
/// listed front to back.  Same rendering rule as above.
struct Layer {
  int x0, y0, w, h;
  int d;
  bool contains(int x, int y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
};

inline LightField render_layers(int X, int Y, int bg_d, const std::vector<Layer>& layers,
                                std::uint64_t seed) {
  LightField lf(5, 5, X, Y);
  const int m = 24;
  const ViewImage bg = value_noise(X + 2 * m, Y + 2 * m, seed, 2, 2);
  std::vector<ViewImage> tex;
  for (std::size_t i = 0; i < layers.size(); ++i)
    tex.push_back(value_noise(X + 2 * m, Y + 2 * m, seed + 1 + i, 2, 2));
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u)
      for (int y = 0; y < Y; ++y)
        for (int x = 0; x < X; ++x) {
          const ViewImage* src = &bg;
          int sx = x - (u - 2) * bg_d, sy = y - (v - 2) * bg_d;
          for (std::size_t i = 0; i < layers.size(); ++i) {
            const int lx = x - (u - 2) * layers[i].d, ly = y - (v - 2) * layers[i].d;
            if (layers[i].contains(lx, ly)) {
              src = &tex[i];
              sx = lx;
              sy = ly;
              break;
            }
          }
          for (int c = 0; c < 3; ++c) lf.at(u, v, x, y, c) = src->at(sx + m, sy + m, c);
        }
  return lf;
}

}  // namespace isty::testing
