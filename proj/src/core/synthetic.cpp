#include "isty/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isty/rng.hpp"

namespace isty {

ViewImage value_noise(int width, int height, std::uint64_t seed, int cell, int octaves) {
  ViewImage out(width, height, 0.0f);
  Rng rng(seed);
  double total = 0.0;
  for (int o = 0; o < octaves; ++o) {
    const int period = cell << o;
    const double weight = 1.0 / (1 << (octaves - 1 - o));
    total += weight;
    const int gw = width / period + 2, gh = height / period + 2;
    ViewImage grid(gw, gh);
    for (float& g : grid.data()) g = static_cast<float>(rng.uniform());
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        for (int c = 0; c < 3; ++c)
          out.at(x, y, c) += static_cast<float>(
              weight * sample_bilinear(grid.data(), gw, gh, 3, c, static_cast<double>(x) / period,
                                       static_cast<double>(y) / period));
  }
  for (float& v : out.data()) v = std::clamp(static_cast<float>(v / total), 0.0f, 1.0f);
  return out;
}

LightField render_plane(const ViewImage& texture, int margin, int U, int V, int X, int Y,
                        double disparity) {
  if (texture.width() < X + 2 * margin || texture.height() < Y + 2 * margin) {
    throw ArgumentError("render_plane: texture smaller than frame plus margin");
  }
  LightField lf(U, V, X, Y);
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < U; ++u) {
      const double sx = -angular_offset_u(lf, u) * disparity + margin;
      const double sy = -angular_offset_v(lf, v) * disparity + margin;
      for (int y = 0; y < Y; ++y)
        for (int x = 0; x < X; ++x)
          for (int c = 0; c < 3; ++c)
            lf.at(u, v, x, y, c) = sample_bilinear(texture.data(), texture.width(),
                                                   texture.height(), 3, c, x + sx, y + sy);
    }
  return lf;
}

LightField make_clean_scene(std::uint64_t seed, int U, int V, int X, int Y, double disparity) {
  const int reach = static_cast<int>(std::ceil(std::abs(disparity) * std::max(U, V) / 2.0)) + 2;
  const ViewImage tex = value_noise(X + 2 * reach, Y + 2 * reach, seed);
  return render_plane(tex, reach, U, V, X, Y, disparity);
}

TemplatePool make_procedural_templates(std::uint64_t seed, int count, int min_size, int max_size) {
  if (count <= 0 || min_size <= 0 || max_size < min_size) {
    throw ArgumentError("make_procedural_templates: bad size range");
  }
  Rng rng(seed);
  TemplatePool pool;
  for (int i = 0; i < count; ++i) {
    const int w = static_cast<int>(rng.uniform_int(min_size, max_size));
    const int h = static_cast<int>(rng.uniform_int(min_size, max_size));
    OcclusionTemplate t{ViewImage(w, h), Raster<1>(w, h, 0.0f), "procedural_" + std::to_string(i)};
    const double base[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
    const ViewImage grain = value_noise(w, h, rng.next(), 2, 2);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c)
          t.rgb.at(x, y, c) =
              static_cast<float>(std::clamp(0.75 * base[c] + 0.25 * grain.at(x, y, c), 0.0, 1.0));
    const int shape = static_cast<int>(rng.uniform_int(0, 2));
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    const bool vertical = rng.coin();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        bool inside = true;
        if (shape == 0) {  // ellipse
          const double ex = (x - cx) / (w / 2.0), ey = (y - cy) / (h / 2.0);
          inside = ex * ex + ey * ey <= 1.0;
        } else if (shape == 1) {  // bar
          inside = vertical ? std::abs(x - cx) <= w / 6.0 : std::abs(y - cy) <= h / 6.0;
        }
        t.alpha.at(x, y) = inside ? 1.0f : 0.0f;
      }
    pool.push_back(std::move(t));
  }
  return pool;
}

}  // namespace isty
