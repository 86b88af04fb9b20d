#pragma once

#include <optional>

#include <torch/torch.h>

#include "isty/nn/config.hpp"

namespace isty::nn {

/// Zero-mean normal with std sqrt(2 / fan_in) for every conv weight below
/// `m`, zero bias.
void init_conv_weights(torch::nn::Module& m);

/// Query/key/value attention over flattened spatial positions.  The value
/// projection may change width, so the residual partner is passed in.
class SelfAttentionImpl : public torch::nn::Module {
 public:
  SelfAttentionImpl(int in_channels, int out_channels, int key_channels, double gamma_init);

  /// residual + gamma * attention(x), key from key_source when given.
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& residual,
                        const std::optional<torch::Tensor>& key_source = std::nullopt);
  torch::Tensor forward(const torch::Tensor& x) { return forward(x, x); }

  /// Row-stochastic [N, HW, HW] matrix; row i holds query position i.
  torch::Tensor attention(const torch::Tensor& x,
                          const std::optional<torch::Tensor>& key_source = std::nullopt);
  torch::Tensor value(const torch::Tensor& x) { return value_->forward(x); }

  torch::Tensor gamma;

 private:
  torch::nn::Conv2d query_{nullptr}, key_{nullptr}, value_{nullptr};
};
TORCH_MODULE(SelfAttention);

/// x + 1x1(concat of four dilated 3x3 branches, rates 1/2/4/8).
class ResASPPImpl : public torch::nn::Module {
 public:
  ResASPPImpl(int channels, double slope);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::ModuleList branches_;
  torch::nn::Conv2d fuse_{nullptr};
  double slope_;
};
TORCH_MODULE(ResASPP);

/// x + conv(lrelu(conv(lrelu(conv(x))))).
class ResBlockImpl : public torch::nn::Module {
 public:
  ResBlockImpl(int channels, double slope);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d c1_{nullptr}, c2_{nullptr}, c3_{nullptr};
  double slope_;
};
TORCH_MODULE(ResBlock);

/// Bounded learnable activation for mask features in [0,1].  Output is in
/// (0,1], strictly increasing, and exactly 1 for fully valid input.
class MaskActivationFnImpl : public torch::nn::Module {
 public:
  explicit MaskActivationFnImpl(MaskActivation kind);
  torch::Tensor forward(const torch::Tensor& m);

 private:
  MaskActivation kind_;
  // gaussian: normalized Gaussian flank, mu = 1 + softplus(rho), gamma = softplus(s)
  // logistic: sigma(a (m - b)) / sigma(a (1 - b)), a = softplus(s)
  torch::Tensor rho_, s_;
};
TORCH_MODULE(MaskActivationFn);

/// One level of the mask-attention chain: strided normalized mask
/// convolution, activation and update.
class MaskStepImpl : public torch::nn::Module {
 public:
  MaskStepImpl(int in_channels, int out_channels, MaskActivation kind);
  /// Returns {attention A^k, updated mask features M^k}.
  std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& mask_features);

 private:
  torch::Tensor weight_;
  MaskActivationFn activation_{nullptr};
};
TORCH_MODULE(MaskStep);

inline torch::Tensor lrelu(const torch::Tensor& x, double slope) {
  return torch::leaky_relu(x, slope);
}

}  // namespace isty::nn
