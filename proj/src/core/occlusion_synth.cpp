#include "isty/occlusion_synth.hpp"

#include <algorithm>
#include <cmath>

#include "isty/image_io.hpp"
#include "isty/lightfield_io.hpp"
#include "isty/rng.hpp"

namespace isty {
namespace fs = std::filesystem;

namespace {

// Bilinear sample with transparent (zero) surroundings.
double sample_zero(std::span<const float> plane, int w, int h, int ch, int c, double x,
                   double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const double fx = x - fx0, fy = y - fy0;
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  auto px = [&](int xi, int yi) -> double {
    if (xi < 0 || yi < 0 || xi >= w || yi >= h) return 0.0;
    return plane[(static_cast<std::size_t>(yi) * w + xi) * ch + c];
  };
  const double a = px(x0, y0), b = px(x0 + 1, y0);
  const double cc = px(x0, y0 + 1), d = px(x0 + 1, y0 + 1);
  const double top = a + fx * (b - a);
  const double bot = cc + fx * (d - cc);
  return top + fy * (bot - top);
}

int overlap(int offset, int size, int frame) {
  return std::max(0, std::min(offset + size, frame) - std::max(offset, 0));
}

}  // namespace

TemplatePool load_template_pool(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LoadError("template directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  TemplatePool pool;
  for (const auto& f : files) {
    DecodedImage img = read_image(f);
    OcclusionTemplate t;
    t.name = f.filename().string();
    t.rgb = std::move(img.rgb);
    t.alpha = img.alpha ? std::move(*img.alpha) : Raster<1>(t.rgb.width(), t.rgb.height(), 1.0f);
    pool.push_back(std::move(t));
  }
  return pool;
}

OcclusionTemplate transform_template(const OcclusionTemplate& tpl, int rgb_permutation,
                                     bool hflip, bool vflip) {
  if (rgb_permutation < 0 || rgb_permutation >= static_cast<int>(kChannelOrders.size())) {
    throw ArgumentError("invalid channel permutation index");
  }
  const auto& order = kChannelOrders[rgb_permutation];
  const int w = tpl.width(), h = tpl.height();
  OcclusionTemplate out{ViewImage(w, h), Raster<1>(w, h), tpl.name};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int sx = hflip ? w - 1 - x : x;
      const int sy = vflip ? h - 1 - y : y;
      for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = tpl.rgb.at(sx, sy, order[c]);
      out.alpha.at(x, y) = tpl.alpha.at(sx, sy);
    }
  return out;
}

std::pair<LightField, SoftMask> embed_occlusion(const LightField& lf,
                                                const OcclusionTemplate& tpl, double d,
                                                std::pair<int, int> offset) {
  if (!std::isfinite(d) || d < 0.0) {
    throw ArgumentError("embed_occlusion: disparity must be finite and >= 0");
  }
  require_same_extent(tpl.rgb, tpl.alpha, "embed_occlusion template");
  const auto [ox, oy] = offset;
  if (overlap(ox, tpl.width(), lf.X()) == 0 || overlap(oy, tpl.height(), lf.Y()) == 0) {
    throw ArgumentError("embed_occlusion: template lies entirely outside the frame");
  }

  LightField out = lf;
  const int w = tpl.width(), h = tpl.height();
  // premultiplied color so fractional shifts blend coverage correctly
  Raster<3> premult(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) premult.at(x, y, c) = tpl.rgb.at(x, y, c) * tpl.alpha.at(x, y);

  SoftMask mask(lf.X(), lf.Y(), 1.0f);
  for (int v = 0; v < lf.V(); ++v) {
    for (int u = 0; u < lf.U(); ++u) {
      const double sx = angular_offset_u(lf, u) * d;
      const double sy = angular_offset_v(lf, v) * d;
      const bool center = u == lf.center_u() && v == lf.center_v();
      const int x_lo = std::max(0, static_cast<int>(std::floor(ox + sx)) - 1);
      const int x_hi = std::min(lf.X() - 1, static_cast<int>(std::ceil(ox + sx + w)) + 1);
      const int y_lo = std::max(0, static_cast<int>(std::floor(oy + sy)) - 1);
      const int y_hi = std::min(lf.Y() - 1, static_cast<int>(std::ceil(oy + sy + h)) + 1);
      for (int y = y_lo; y <= y_hi; ++y) {
        const double ty = y - oy - sy;
        for (int x = x_lo; x <= x_hi; ++x) {
          const double tx = x - ox - sx;
          const double a = sample_zero(tpl.alpha.data(), w, h, 1, 0, tx, ty);
          if (a == 0.0) continue;
          for (int c = 0; c < 3; ++c) {
            const double p = sample_zero(premult.data(), w, h, 3, c, tx, ty);
            float& dst = out.at(u, v, x, y, c);
            dst = static_cast<float>(std::clamp(p + (1.0 - a) * dst, 0.0, 1.0));
          }
          if (center) mask.at(x, y) = static_cast<float>(1.0 - a);
        }
      }
    }
  }
  return {std::move(out), std::move(mask)};
}

EmbedSpec sample_embed_spec(std::uint64_t seed, const EmbedConfig& cfg, const TemplatePool& pool) {
  if (pool.empty()) throw ConfigError("sample_embed_spec: template pool is empty");
  if (cfg.min_count < 1 || cfg.max_count < cfg.min_count ||
      cfg.max_count > static_cast<int>(cfg.bands.size())) {
    throw ConfigError("sample_embed_spec: occluder count range does not match the bands");
  }
  if (cfg.frame_width <= 0 || cfg.frame_height <= 0) {
    throw ConfigError("sample_embed_spec: frame size not set");
  }
  Rng rng(seed);
  EmbedSpec spec;
  spec.seed = seed;
  const int count = static_cast<int>(rng.uniform_int(cfg.min_count, cfg.max_count));
  for (int k = 0; k < count; ++k) {
    EmbedItem it;
    it.d = rng.uniform(cfg.bands[k].first, cfg.bands[k].second);
    it.template_id = static_cast<int>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1));
    it.rgb_permutation = cfg.shuffle_channels ? static_cast<int>(rng.uniform_int(0, 5)) : 0;
    it.hflip = cfg.random_flips && rng.coin();
    it.vflip = cfg.random_flips && rng.coin();
    const int w = pool[it.template_id].width(), h = pool[it.template_id].height();
    const double need = cfg.min_visible * w * h;
    // rejection keeps the offset uniform over the admissible placements
    for (int attempt = 0;; ++attempt) {
      const int ox = static_cast<int>(rng.uniform_int(1 - w, cfg.frame_width - 1));
      const int oy = static_cast<int>(rng.uniform_int(1 - h, cfg.frame_height - 1));
      const double seen = static_cast<double>(overlap(ox, w, cfg.frame_width)) *
                          overlap(oy, h, cfg.frame_height);
      if (seen >= need) {
        it.offset_x = ox;
        it.offset_y = oy;
        break;
      }
      if (attempt > 100000) throw ConfigError("no admissible template placement");
    }
    spec.items.push_back(it);
  }
  return spec;
}

TrainSample make_train_sample(const LightField& lf_clean, const EmbedSpec& spec,
                              const TemplatePool& pool) {
  std::vector<EmbedItem> items = spec.items;
  std::stable_sort(items.begin(), items.end(),
                   [](const EmbedItem& a, const EmbedItem& b) { return a.d < b.d; });
  TrainSample s;
  s.lf_occ = lf_clean;
  s.i_gt = center_view(lf_clean);
  s.m_gt = SoftMask(lf_clean.X(), lf_clean.Y(), 1.0f);
  for (const EmbedItem& it : items) {
    if (it.template_id < 0 || it.template_id >= static_cast<int>(pool.size())) {
      throw ArgumentError("embed item references unknown template");
    }
    const OcclusionTemplate tpl =
        transform_template(pool[it.template_id], it.rgb_permutation, it.hflip, it.vflip);
    auto [lf, m] = embed_occlusion(s.lf_occ, tpl, it.d, {it.offset_x, it.offset_y});
    s.lf_occ = std::move(lf);
    for (std::size_t i = 0; i < m.data().size(); ++i) s.m_gt.data()[i] *= m.data()[i];
  }
  return s;
}

AugmentDecision sample_augment(std::uint64_t seed, int width, int height,
                               std::pair<int, int> crop) {
  const auto [cw, ch] = crop;
  if (cw <= 0 || ch <= 0 || cw > width || ch > height) {
    throw ArgumentError("augment: crop larger than frame");
  }
  Rng rng(seed);
  AugmentDecision a;
  a.x0 = static_cast<int>(rng.uniform_int(0, width - cw));
  a.y0 = static_cast<int>(rng.uniform_int(0, height - ch));
  a.hflip = rng.coin();
  return a;
}

LightField hflip_lightfield(const LightField& lf) {
  LightField out(lf.U(), lf.V(), lf.X(), lf.Y());
  out.bit_depth = lf.bit_depth;
  out.disparity_unit = lf.disparity_unit;
  for (int v = 0; v < lf.V(); ++v)
    for (int u = 0; u < lf.U(); ++u) {
      const int su = lf.U() - 1 - u;
      for (int y = 0; y < lf.Y(); ++y)
        for (int x = 0; x < lf.X(); ++x)
          for (int c = 0; c < 3; ++c) out.at(u, v, x, y, c) = lf.at(su, v, lf.X() - 1 - x, y, c);
    }
  return out;
}

TrainSample apply_augment(const TrainSample& s, const AugmentDecision& a,
                          std::pair<int, int> crop) {
  const int X = s.lf_occ.X(), Y = s.lf_occ.Y();
  const auto [cw, ch] = crop;
  if (cw <= 0 || ch <= 0 || cw > X || ch > Y || a.x0 < 0 || a.y0 < 0 || a.x0 + cw > X ||
      a.y0 + ch > Y) {
    throw ArgumentError("augment: crop window outside the frame");
  }
  TrainSample out;
  out.name = s.name;
  out.lf_occ = LightField(s.lf_occ.U(), s.lf_occ.V(), cw, ch);
  out.lf_occ.bit_depth = s.lf_occ.bit_depth;
  out.lf_occ.disparity_unit = s.lf_occ.disparity_unit;
  out.i_gt = ViewImage(cw, ch);
  out.m_gt = SoftMask(cw, ch);
  const int U = s.lf_occ.U();
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) {
      const int sx = a.hflip ? a.x0 + cw - 1 - x : a.x0 + x;
      const int sy = a.y0 + y;
      for (int v = 0; v < s.lf_occ.V(); ++v)
        for (int u = 0; u < U; ++u) {
          const int su = a.hflip ? U - 1 - u : u;
          for (int c = 0; c < 3; ++c) out.lf_occ.at(u, v, x, y, c) = s.lf_occ.at(su, v, sx, sy, c);
        }
      for (int c = 0; c < 3; ++c) out.i_gt.at(x, y, c) = s.i_gt.at(sx, sy, c);
      out.m_gt.at(x, y) = s.m_gt.at(sx, sy);
    }
  return out;
}

TrainSample augment(const TrainSample& s, std::uint64_t seed, std::pair<int, int> crop) {
  return apply_augment(s, sample_augment(seed, s.lf_occ.X(), s.lf_occ.Y(), crop), crop);
}

EmbedSpec test_set_spec(std::uint64_t seed, std::size_t index, TestMode mode, int width,
                        int height, const TemplatePool& pool) {
  EmbedConfig cfg;
  const int n = mode == TestMode::single ? 1 : 2;
  cfg.bands.assign(n, {1.0, 4.0});
  cfg.min_count = cfg.max_count = n;
  cfg.shuffle_channels = false;
  cfg.random_flips = false;
  cfg.frame_width = width;
  cfg.frame_height = height;
  return sample_embed_spec(mix_seed(seed, index), cfg, pool);
}

std::vector<TrainSample> make_test_set(const std::vector<LightField>& clean, TestMode mode,
                                       std::uint64_t seed, const TemplatePool& pool) {
  if (clean.empty()) throw ConfigError("make_test_set: no clean light fields");
  if (pool.empty()) throw ConfigError("make_test_set: template pool is empty");
  std::vector<TrainSample> out;
  out.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const EmbedSpec spec = test_set_spec(seed, i, mode, clean[i].X(), clean[i].Y(), pool);
    TrainSample s = make_train_sample(clean[i], spec, pool);
    s.name = "scene_" + std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

void save_train_sample(const fs::path& dir, const TrainSample& s) {
  save_lightfield(dir, s.lf_occ);
  write_png(dir / "i_gt.png", s.i_gt, 8);
  write_png(dir / "m_gt.png", static_cast<const Raster<1>&>(s.m_gt), 8);
}

TrainSample load_train_sample(const fs::path& dir) {
  TrainSample s;
  s.lf_occ = load_lightfield(dir, LightFieldFormat::view_dir);
  s.i_gt = read_image(dir / "i_gt.png").rgb;
  s.m_gt = SoftMask(read_gray(dir / "m_gt.png"));
  s.name = dir.filename().string();
  require_same_extent(s.i_gt, s.m_gt, "load_train_sample");
  if (s.i_gt.width() != s.lf_occ.X() || s.i_gt.height() != s.lf_occ.Y()) {
    throw FormatError("i_gt size differs from the light field in " + dir.string());
  }
  return s;
}

}  // namespace isty
