#include "isty/mask_ops.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace isty {
using nlohmann::json;

SoftMask FbsMaskModel::generate(const LightField& lf) const {
  const FbsScoreMap fbs = compute_fbs(lf, cfg_);
  SoftMask m(fbs.score.width(), fbs.score.height());
  for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = 0.5f * (fbs.score.data()[i] + 1.0f);
  m.clamp();
  return m;
}

SoftMask mask_at_disparity(const LightField& lf, double d, const MaskModel& model) {
  if (!std::isfinite(d)) throw ArgumentError("mask_at_disparity: d must be finite");
  return model.generate(reparameterize(lf, d));
}

SoftMask band_mask(const SoftMask& m_d1, const SoftMask& m_d2) {
  require_same_shape<1>(m_d1, m_d2, "band_mask");
  SoftMask out(m_d1.width(), m_d1.height());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    const float v = 1.0f - (m_d2.data()[i] - m_d1.data()[i]);
    out.data()[i] = std::clamp(v, 0.0f, 1.0f);
  }
  return out;
}

namespace {

bool on_segment(double x, double y, double xi, double yi, double xj, double yj) {
  const double cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi);
  if (std::abs(cross) > 1e-9) return false;
  return x >= std::min(xi, xj) && x <= std::max(xi, xj) && y >= std::min(yi, yj) &&
         y <= std::max(yi, yj);
}

// Even-odd rule; points on an edge count as inside so a stroke traced along
// the frame border covers the border pixels.
bool inside(const Polygon& p, double x, double y) {
  bool in = false;
  const auto& pts = p.points;
  for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
    const auto [xi, yi] = pts[i];
    const auto [xj, yj] = pts[j];
    if (on_segment(x, y, xi, yi, xj, yj)) return true;
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

bool in_frame(double x, double y, int w, int h) {
  return x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1;
}

}  // namespace

SoftMask merge_user_edit(const SoftMask& m, const std::vector<Stroke>& strokes) {
  SoftMask out = m;
  const int w = m.width(), h = m.height();
  for (const Stroke& s : strokes) {
    if (s.value != 0 && s.value != 1) throw ArgumentError("stroke value must be 0 or 1");
    const float value = static_cast<float>(s.value);
    if (const auto* d = std::get_if<Disc>(&s.region)) {
      if (!in_frame(d->cx, d->cy, w, h) || !(d->radius >= 0.0)) {
        throw ArgumentError("disc stroke outside the frame");
      }
      const int x0 = std::max(0, static_cast<int>(std::floor(d->cx - d->radius)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(d->cx + d->radius)));
      const int y0 = std::max(0, static_cast<int>(std::floor(d->cy - d->radius)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(d->cy + d->radius)));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const double dx = x - d->cx, dy = y - d->cy;
          if (dx * dx + dy * dy <= d->radius * d->radius) out.at(x, y) = value;
        }
    } else {
      const auto& poly = std::get<Polygon>(s.region);
      if (poly.points.size() < 3) throw ArgumentError("polygon stroke needs three points");
      double minx = w, maxx = -1, miny = h, maxy = -1;
      for (const auto& [px, py] : poly.points) {
        if (!in_frame(px, py, w, h)) throw ArgumentError("polygon stroke outside the frame");
        minx = std::min(minx, px);
        maxx = std::max(maxx, px);
        miny = std::min(miny, py);
        maxy = std::max(maxy, py);
      }
      for (int y = static_cast<int>(std::floor(miny)); y <= static_cast<int>(std::ceil(maxy)); ++y)
        for (int x = static_cast<int>(std::floor(minx)); x <= static_cast<int>(std::ceil(maxx)); ++x)
          if (x >= 0 && y >= 0 && x < w && y < h && inside(poly, x, y)) out.at(x, y) = value;
    }
  }
  return out;
}

std::vector<Stroke> strokes_from_json(const std::string& text) {
  std::vector<Stroke> out;
  try {
    const json doc = json::parse(text);
    const json& list = doc.is_array() ? doc : doc.at("strokes");
    for (const json& j : list) {
      Stroke s;
      s.value = j.at("value").get<int>();
      const std::string type = j.at("type").get<std::string>();
      if (type == "disc") {
        s.region = Disc{j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("r").get<double>()};
      } else if (type == "polygon") {
        Polygon p;
        for (const json& pt : j.at("points")) p.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
        s.region = std::move(p);
      } else {
        throw FormatError("unknown stroke type '" + type + "'");
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed stroke document: ") + e.what());
  }
  return out;
}

std::string strokes_to_json(const std::vector<Stroke>& strokes) {
  json list = json::array();
  for (const Stroke& s : strokes) {
    if (const auto* d = std::get_if<Disc>(&s.region)) {
      list.push_back({{"type", "disc"}, {"cx", d->cx}, {"cy", d->cy}, {"r", d->radius}, {"value", s.value}});
    } else {
      json pts = json::array();
      for (const auto& [x, y] : std::get<Polygon>(s.region).points) pts.push_back({x, y});
      list.push_back({{"type", "polygon"}, {"points", pts}, {"value", s.value}});
    }
  }
  return json{{"strokes", list}}.dump();
}

}  // namespace isty
