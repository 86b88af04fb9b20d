#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include <torch/torch.h>

namespace isty::nn {

struct LossWeights {
  double lambda1 = 0.01;  // perceptual
  double lambda2 = 120.0; // style
};

/// Maps an image batch [N,3,H,W] to a list of feature maps.
using FeatureFn = std::function<std::vector<torch::Tensor>(const torch::Tensor&)>;

/// First three blocks of the 16-layer VGG layout; returns pool1..pool3.
/// Parameters are frozen.  Inputs in [0,1] are normalized with the ImageNet
/// statistics first.
class Vgg16FeaturesImpl : public torch::nn::Module {
 public:
  /// Seeded random weights (offline mode).
  explicit Vgg16FeaturesImpl(uint64_t seed = 0);

  std::vector<torch::Tensor> forward(const torch::Tensor& img);
  /// Reads a name -> tensor dictionary written by tools/export_vgg16.py
  /// ("features.<index>.weight"/".bias").
  void load_weights(const std::filesystem::path& file);

 private:
  std::vector<std::pair<int, torch::nn::Conv2d>> convs_;  // torchvision layer index
  torch::Tensor mean_, std_;
};
TORCH_MODULE(Vgg16Features);

/// [N, C, C] Gram matrix normalized by C*H*W.
torch::Tensor gram(const torch::Tensor& f);

struct ImageLoss {
  torch::Tensor total, l1, perceptual, style;
};

/// l1 + lambda1 * sum_l mean|phi_l(out) - phi_l(gt)| + lambda2 * sum_l mean|G_l(out) - G_l(gt)|.
ImageLoss loss_image(const torch::Tensor& out, const torch::Tensor& gt, const LossWeights& w,
                     const FeatureFn& features);

/// Mean squared error.
torch::Tensor loss_mask(const torch::Tensor& m, const torch::Tensor& m_gt);

}  // namespace isty::nn
