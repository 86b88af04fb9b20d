#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "isty/lightfield.hpp"

namespace isty {

/// Occluder image with coverage; alpha 1 = opaque.
struct OcclusionTemplate {
  ViewImage rgb;
  Raster<1> alpha;
  std::string name;

  int width() const noexcept { return rgb.width(); }
  int height() const noexcept { return rgb.height(); }
};

using TemplatePool = std::vector<OcclusionTemplate>;

/// Every RGBA PNG in `dir`, sorted by file name.  Images without an alpha
/// channel are treated as fully opaque.
TemplatePool load_template_pool(const std::filesystem::path& dir);

/// rgb_permutation[k] is the source channel written to output channel k.
using ChannelOrder = std::array<int, 3>;
inline constexpr std::array<ChannelOrder, 6> kChannelOrders = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

struct EmbedItem {
  int template_id = 0;
  double d = 0.0;
  int rgb_permutation = 0;  // index into kChannelOrders
  bool hflip = false;
  bool vflip = false;
  int offset_x = 0;  // template top-left in the center view
  int offset_y = 0;
};

struct EmbedSpec {
  std::vector<EmbedItem> items;
  std::uint64_t seed = 0;
};

struct EmbedConfig {
  /// Item k draws its disparity from bands[k].
  std::vector<std::pair<double, double>> bands = {{0.0, 1.0}, {1.0, 4.0}, {4.0, 9.0}};
  int min_count = 1;
  int max_count = 3;
  bool shuffle_channels = true;
  bool random_flips = true;
  /// Minimum fraction of the template area kept inside the frame.
  double min_visible = 0.25;
  int frame_width = 0;
  int frame_height = 0;
};

struct TrainSample {
  LightField lf_occ;
  ViewImage i_gt;
  SoftMask m_gt;
  std::string name;
};

OcclusionTemplate transform_template(const OcclusionTemplate& tpl, int rgb_permutation,
                                     bool hflip, bool vflip);

/// Replicates the template into every view with the translation that gives
/// it disparity d (view (du,dv) holds the copy at offset + (du*d, dv*d)), then
/// composites alpha-over.  The returned mask is 1 - alpha at the center view.
std::pair<LightField, SoftMask> embed_occlusion(const LightField& lf,
                                                const OcclusionTemplate& tpl, double d,
                                                std::pair<int, int> offset);

EmbedSpec sample_embed_spec(std::uint64_t seed, const EmbedConfig& cfg, const TemplatePool& pool);

/// Composites back to front (ascending d).  Caller guarantees lf_clean holds
/// only negative-disparity content.
TrainSample make_train_sample(const LightField& lf_clean, const EmbedSpec& spec,
                              const TemplatePool& pool);

struct AugmentDecision {
  int x0 = 0, y0 = 0;
  bool hflip = false;
};

AugmentDecision sample_augment(std::uint64_t seed, int width, int height,
                               std::pair<int, int> crop);
/// Same crop/flip for every view, i_gt and m_gt.  The flip also reverses the
/// u axis so disparities keep their sign.
TrainSample apply_augment(const TrainSample& s, const AugmentDecision& a,
                          std::pair<int, int> crop);
TrainSample augment(const TrainSample& s, std::uint64_t seed, std::pair<int, int> crop);

LightField hflip_lightfield(const LightField& lf);

enum class TestMode { single, double_occ };

/// Embedding spec for scene `index` of a fixed test set.
EmbedSpec test_set_spec(std::uint64_t seed, std::size_t index, TestMode mode, int width,
                        int height, const TemplatePool& pool);

/// Fixed evaluation set: one or two occluders per scene, d uniform in [1,4],
/// scene i seeded from mix_seed(seed, i).
std::vector<TrainSample> make_test_set(const std::vector<LightField>& clean, TestMode mode,
                                       std::uint64_t seed, const TemplatePool& pool);

/// Writes the scene layout plus i_gt.png and m_gt.png (8-bit, 255 = background).
void save_train_sample(const std::filesystem::path& dir, const TrainSample& s);
TrainSample load_train_sample(const std::filesystem::path& dir);

}  // namespace isty
