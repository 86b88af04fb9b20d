#pragma once

#include <string>
#include <vector>

namespace isty::nn {

enum class FusionKind { conv1x1, sa_fusion, mf_fusion };
enum class MaskActivation { gaussian, logistic };

FusionKind parse_fusion(const std::string& s);
std::string to_string(FusionKind k);
MaskActivation parse_activation(const std::string& s);
std::string to_string(MaskActivation a);

/// Network shape.  lfe_widths has K+1 entries (f^0..f^K), oi_widths has K
/// (encoder levels 1..K), omg_widths has 3 (levels 0..2).
struct ModelConfig {
  int U = 5, V = 5;
  int K = 6;
  std::vector<int> lfe_widths = {64, 128, 256, 512, 512, 512, 512};
  std::vector<int> omg_widths = {32, 64, 128};
  std::vector<int> oi_widths = {64, 128, 256, 512, 512, 512};
  int attention_from = 2;  // first LFE encoder level with self-attention
  double leaky_slope = 0.2;
  double gamma_init = 0.25;
  FusionKind fusion = FusionKind::conv1x1;
  MaskActivation activation = MaskActivation::gaussian;

  void validate() const;
  /// Spatial sizes must be divisible by 2^K.
  void check_input(int width, int height) const;
  int stride() const { return 1 << K; }

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  bool operator==(const ModelConfig&) const = default;
};

/// Every width 8, K = 3; used for gradient checks.
ModelConfig tiny_config(int U = 5, int V = 5);

}  // namespace isty::nn
