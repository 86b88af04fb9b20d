#pragma once

#include <vector>

#include <torch/torch.h>

#include "isty/nn/config.hpp"
#include "isty/nn/layers.hpp"

namespace isty::nn {

// Tensors are NCHW with H = Y and W = X.

/// LF feature extractor: SAI stack [N, 3UV, H, W] -> pyramid f^0..f^K.
class LfeImpl : public torch::nn::Module {
 public:
  explicit LfeImpl(const ModelConfig& cfg);

  torch::Tensor init_features(const torch::Tensor& sai);
  /// `pre_attention`, when given, receives each level before self-attention.
  std::vector<torch::Tensor> encode(const torch::Tensor& f0,
                                    std::vector<torch::Tensor>* pre_attention = nullptr);
  std::vector<torch::Tensor> forward(const torch::Tensor& sai) { return encode(init_features(sai)); }

  /// nullptr for levels without attention.
  SelfAttention attention(int level) const { return attention_.at(level); }

 private:
  ModelConfig cfg_;
  torch::nn::Conv2d stem_{nullptr};
  ResASPP aspp1_{nullptr}, aspp2_{nullptr};
  ResBlock res1_{nullptr}, res2_{nullptr};
  std::vector<torch::nn::Conv2d> down_;
  std::vector<torch::nn::BatchNorm2d> norm_;
  std::vector<SelfAttention> attention_;  // indexed by level, entry 0 unused
};
TORCH_MODULE(Lfe);

/// Occlusion mask generator: (FBS score, center view, f^0..f^2) -> soft mask
/// [N, 1, H, W], 1 = background.
class OmgImpl : public torch::nn::Module {
 public:
  explicit OmgImpl(const ModelConfig& cfg);

  /// 2-channel head before the softmax.
  torch::Tensor logits(const torch::Tensor& fbs, const torch::Tensor& cv,
                       const std::vector<torch::Tensor>& pyramid);
  torch::Tensor forward(const torch::Tensor& fbs, const torch::Tensor& cv,
                        const std::vector<torch::Tensor>& pyramid);

  torch::nn::Conv2d head() const { return head_; }

 private:
  ModelConfig cfg_;
  torch::nn::Conv2d e0a_{nullptr}, e0b_{nullptr}, e1_{nullptr}, e2_{nullptr};
  torch::nn::Conv2d p0_{nullptr}, p1_{nullptr}, p2_{nullptr};  // feature projections
  torch::nn::Conv2d d2_{nullptr}, d1_{nullptr}, d0_{nullptr};
  torch::nn::ConvTranspose2d u2_{nullptr}, u1_{nullptr};
  torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(Omg);

/// LF feature / decoder feature fusion at one decoder level.
class FusionImpl : public torch::nn::Module {
 public:
  FusionImpl(FusionKind kind, int lf_channels, int dc_channels, double gamma_init);
  torch::Tensor forward(const torch::Tensor& f_lf, const torch::Tensor& f_dc,
                        const torch::Tensor& a_rm);

  FusionKind kind() const { return kind_; }
  torch::nn::Conv2d conv() const { return conv_; }
  SelfAttention attention() const { return attention_; }
  torch::Tensor gamma;  // conv1x1 only; the attention kinds own theirs

 private:
  FusionKind kind_;
  int dc_channels_;
  torch::nn::Conv2d conv_{nullptr};
  SelfAttention attention_{nullptr};
};
TORCH_MODULE(Fusion);

struct MaskChain {
  std::vector<torch::Tensor> a_m;   // A_M^1..A_M^K
  std::vector<torch::Tensor> a_rm;  // A_RM^1..A_RM^K
};

struct InpaintResult {
  torch::Tensor out;   // composite, clamped to [0,1]
  torch::Tensor pred;  // raw decoder prediction
};

/// Occlusion inpainter with forward and reverse mask attention.
class OiImpl : public torch::nn::Module {
 public:
  explicit OiImpl(const ModelConfig& cfg);

  MaskChain mask_chain(const torch::Tensor& m);
  /// pyramid holds f^0..f^K (f^0 is not used here).
  InpaintResult forward(const torch::Tensor& cv, const torch::Tensor& m,
                        const std::vector<torch::Tensor>& pyramid);

  Fusion fusion(int level) const { return fusion_.at(level); }

 private:
  ModelConfig cfg_;
  std::vector<MaskStep> forward_steps_, reverse_steps_;
  std::vector<torch::nn::Conv2d> enc_;
  std::vector<torch::nn::ConvTranspose2d> dec_;  // dec_[k] maps level k to k-1
  std::vector<Fusion> fusion_;                   // indexed by level, entry 0 unused
};
TORCH_MODULE(Oi);

struct NetOutput {
  torch::Tensor mask;
  torch::Tensor out;
  torch::Tensor pred;
  std::vector<torch::Tensor> pyramid;
};

/// LFE -> OMG -> OI.
class IstyNetImpl : public torch::nn::Module {
 public:
  explicit IstyNetImpl(const ModelConfig& cfg);

  NetOutput forward(const torch::Tensor& sai, const torch::Tensor& fbs);
  /// Inpaint with an externally supplied mask (edited or band masks).
  InpaintResult inpaint(const torch::Tensor& sai, const torch::Tensor& mask);
  torch::Tensor center_view(const torch::Tensor& sai) const;

  const ModelConfig& config() const { return cfg_; }
  Lfe lfe{nullptr};
  Omg omg{nullptr};
  Oi oi{nullptr};

 private:
  void check(const torch::Tensor& sai) const;
  ModelConfig cfg_;
};
TORCH_MODULE(IstyNet);

}  // namespace isty::nn
