#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "isty/fbs.hpp"
#include "isty/lightfield.hpp"
#include "isty/raster.hpp"

namespace isty {

/// Anything that turns a light field into a center-view occlusion mask with
/// zero disparity as the separating plane.
class MaskModel {
 public:
  virtual ~MaskModel() = default;
  virtual SoftMask generate(const LightField& lf) const = 0;
};

/// A mask model that can also fill the center view under a given mask.
class Deoccluder : public MaskModel {
 public:
  virtual ViewImage inpaint(const LightField& lf, const SoftMask& mask) const = 0;
};

/// Mask straight from the FBS score: (score + 1) / 2.
class FbsMaskModel : public MaskModel {
 public:
  explicit FbsMaskModel(FbsConfig cfg = {}) : cfg_(std::move(cfg)) {}
  SoftMask generate(const LightField& lf) const override;

 private:
  FbsConfig cfg_;
};

/// Mask for "everything closer than disparity d": the model applied to the
/// light field refocused at d.
SoftMask mask_at_disparity(const LightField& lf, double d, const MaskModel& model);

/// Removes objects whose disparity lies in [d1, d2] and keeps everything
/// else, given M^{d1} and M^{d2} (d1 < d2):  clamp(1 - (M^{d2} - M^{d1}), 0, 1).
SoftMask band_mask(const SoftMask& m_d1, const SoftMask& m_d2);

struct Disc {
  double cx = 0, cy = 0, radius = 0;
};
struct Polygon {
  std::vector<std::pair<double, double>> points;
};

/// One user edit: every pixel (center) inside `region` is set to `value`,
/// 1 = keep (background), 0 = remove.
struct Stroke {
  std::variant<Disc, Polygon> region;
  int value = 1;
};

/// Later strokes win.  Disc centers / polygon vertices must lie in the frame.
SoftMask merge_user_edit(const SoftMask& m, const std::vector<Stroke>& strokes);

/// {"strokes": [{"type": "disc", "cx", "cy", "r", "value"},
///              {"type": "polygon", "points": [[x, y], ...], "value"}]}
std::vector<Stroke> strokes_from_json(const std::string& text);
std::string strokes_to_json(const std::vector<Stroke>& strokes);

}  // namespace isty
