#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "isty/lightfield.hpp"

namespace isty {

/// Winner-take-all disparity per pixel; every value is one of `candidates`.
struct DisparityMap {
  Raster<1> values;
  std::vector<double> candidates;  // sorted ascending
  /// 1 where no candidate had enough valid views and the fallback was used.
  std::vector<std::uint8_t> flagged;
};

/// Foreground/background score in [-1, 1]; positive = behind the plane d0.
struct FbsScoreMap {
  Raster<1> score;
  double d0 = 0.0;
  double s_norm = 2.0;
};

struct FbsConfig {
  std::vector<double> candidates = default_candidates();
  int window = 3;
  double d0 = 0.0;
  double s_norm = 2.0;

  /// -4.0, -3.5, ..., +9.0
  static std::vector<double> default_candidates();
};

/// Plane sweep: for every candidate the light field is reparameterized, the
/// per-pixel variance across in-frame views (mean over color) is box-filtered
/// over `window`, and the cheapest candidate wins.  Ties go to the candidate
/// nearest zero, then to the smaller one.
DisparityMap disparity_sweep(const LightField& lf, std::vector<double> candidates, int window);

/// score = clamp((d0 - disparity) / s_norm, -1, 1)
FbsScoreMap fbs_score(const DisparityMap& disp, double d0, double s_norm);

FbsScoreMap compute_fbs(const LightField& lf, const FbsConfig& cfg = {});

/// 16-bit PNG with [-1,1] -> [0,65535] and a JSON sidecar holding d0/s_norm.
void save_fbs(const std::filesystem::path& png, const FbsScoreMap& fbs);
FbsScoreMap load_fbs(const std::filesystem::path& png);

}  // namespace isty
