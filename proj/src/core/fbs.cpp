#include "isty/fbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "isty/image_io.hpp"
#include "json.hpp"

namespace isty {
namespace {

constexpr int kMinViews = 2;
constexpr double kInvalid = std::numeric_limits<double>::infinity();

// true if candidate a should win over b at equal cost
bool preferred(double a, double b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
  return a < b;
}

double fallback_candidate(const std::vector<double>& c) {
  double best = c.front();
  for (double d : c)
    if (preferred(d, best)) best = d;
  return best;
}

// Cross-view variance per pixel (mean over color), inf where < kMinViews.
std::vector<double> view_variance(const LightField& lf, double d) {
  const LightField shifted = reparameterize(lf, d);
  const SampleValidity valid(lf.U(), lf.V(), lf.X(), lf.Y(), d);
  const int X = lf.X(), Y = lf.Y();
  std::vector<double> cost(static_cast<std::size_t>(X) * Y, kInvalid);
  for (int y = 0; y < Y; ++y) {
    for (int x = 0; x < X; ++x) {
      int n = 0;
      double sum[3] = {0, 0, 0};
      for (int v = 0; v < lf.V(); ++v)
        for (int u = 0; u < lf.U(); ++u) {
          if (!valid.valid(u, v, x, y)) continue;
          ++n;
          for (int c = 0; c < 3; ++c) sum[c] += shifted.at(u, v, x, y, c);
        }
      if (n < kMinViews) continue;
      double mean[3], var = 0.0;
      for (int c = 0; c < 3; ++c) mean[c] = sum[c] / n;
      for (int v = 0; v < lf.V(); ++v)
        for (int u = 0; u < lf.U(); ++u) {
          if (!valid.valid(u, v, x, y)) continue;
          for (int c = 0; c < 3; ++c) {
            const double e = shifted.at(u, v, x, y, c) - mean[c];
            var += e * e;
          }
        }
      cost[static_cast<std::size_t>(y) * X + x] = var / (3.0 * n);
    }
  }
  return cost;
}

std::vector<double> box_aggregate(const std::vector<double>& cost, int X, int Y, int window) {
  const int r = window / 2;
  std::vector<double> out(cost.size(), kInvalid);
  for (int y = 0; y < Y; ++y)
    for (int x = 0; x < X; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= Y) continue;
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= X) continue;
          const double c = cost[static_cast<std::size_t>(yy) * X + xx];
          if (c == kInvalid) continue;
          s += c;
          ++n;
        }
      }
      if (n > 0) out[static_cast<std::size_t>(y) * X + x] = s / n;
    }
  return out;
}

}  // namespace

std::vector<double> FbsConfig::default_candidates() {
  std::vector<double> c;
  for (int i = -8; i <= 18; ++i) c.push_back(i * 0.5);
  return c;
}

DisparityMap disparity_sweep(const LightField& lf, std::vector<double> candidates, int window) {
  if (candidates.size() < 2) throw ArgumentError("disparity_sweep: need at least two candidates");
  if (window < 1 || window % 2 == 0) throw ArgumentError("disparity_sweep: window must be odd and >= 1");
  for (double d : candidates)
    if (!std::isfinite(d)) throw ArgumentError("disparity_sweep: non-finite candidate");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const int X = lf.X(), Y = lf.Y();
  const std::size_t n = static_cast<std::size_t>(X) * Y;
  std::vector<double> best_cost(n, kInvalid);
  std::vector<double> best_d(n, std::numeric_limits<double>::quiet_NaN());

  // Candidates are reduced in ascending order, so the result does not depend
  // on how the per-candidate costs were produced.
  for (double d : candidates) {
    const auto agg = box_aggregate(view_variance(lf, d), X, Y, window);
    for (std::size_t i = 0; i < n; ++i) {
      if (agg[i] == kInvalid) continue;
      if (agg[i] < best_cost[i] || (agg[i] == best_cost[i] && preferred(d, best_d[i]))) {
        best_cost[i] = agg[i];
        best_d[i] = d;
      }
    }
  }

  DisparityMap out;
  out.values = Raster<1>(X, Y);
  out.candidates = candidates;
  out.flagged.assign(n, 0);
  const double fallback = fallback_candidate(candidates);
  for (std::size_t i = 0; i < n; ++i) {
    if (best_cost[i] == kInvalid) {
      out.values.data()[i] = static_cast<float>(fallback);
      out.flagged[i] = 1;
    } else {
      out.values.data()[i] = static_cast<float>(best_d[i]);
    }
  }
  return out;
}

FbsScoreMap fbs_score(const DisparityMap& disp, double d0, double s_norm) {
  if (!(s_norm > 0.0)) throw ArgumentError("fbs_score: s_norm must be positive");
  FbsScoreMap out;
  out.d0 = d0;
  out.s_norm = s_norm;
  out.score = Raster<1>(disp.values.width(), disp.values.height());
  auto src = disp.values.data();
  auto dst = out.score.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = static_cast<float>(std::clamp((d0 - src[i]) / s_norm, -1.0, 1.0));
  }
  return out;
}

FbsScoreMap compute_fbs(const LightField& lf, const FbsConfig& cfg) {
  return fbs_score(disparity_sweep(lf, cfg.candidates, cfg.window), cfg.d0, cfg.s_norm);
}

void save_fbs(const std::filesystem::path& png, const FbsScoreMap& fbs) {
  Raster<1> mapped(fbs.score.width(), fbs.score.height());
  for (std::size_t i = 0; i < mapped.data().size(); ++i)
    mapped.data()[i] = (fbs.score.data()[i] + 1.0f) * 0.5f;
  write_png(png, mapped, 16);
  auto sidecar = png;
  sidecar.replace_extension(".json");
  std::ofstream f(sidecar);
  f << nlohmann::json{{"d0", fbs.d0}, {"s_norm", fbs.s_norm}}.dump(2) << "\n";
  if (!f) throw Error("cannot write " + sidecar.string());
}

FbsScoreMap load_fbs(const std::filesystem::path& png) {
  FbsScoreMap out;
  Raster<1> mapped = read_gray(png);
  out.score = Raster<1>(mapped.width(), mapped.height());
  for (std::size_t i = 0; i < mapped.data().size(); ++i)
    out.score.data()[i] = mapped.data()[i] * 2.0f - 1.0f;
  auto sidecar = png;
  sidecar.replace_extension(".json");
  std::ifstream f(sidecar);
  if (!f) throw LoadError("missing FBS sidecar " + sidecar.string());
  const auto j = nlohmann::json::parse(f);
  out.d0 = j.at("d0").get<double>();
  out.s_norm = j.at("s_norm").get<double>();
  return out;
}

}  // namespace isty
