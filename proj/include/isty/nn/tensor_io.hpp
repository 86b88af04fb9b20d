#pragma once

#include <vector>

#include <torch/torch.h>

#include "isty/fbs.hpp"
#include "isty/lightfield.hpp"
#include "isty/occlusion_synth.hpp"

namespace isty::nn {

/// [1, 3UV, Y, X], channel 3(vU+u)+c.
torch::Tensor lightfield_to_tensor(const LightField& lf);
/// [1, 3, Y, X]
torch::Tensor image_to_tensor(const ViewImage& img);
/// [1, 1, Y, X]
torch::Tensor mask_to_tensor(const Raster<1>& m);

/// Accepts [1, 3, H, W] or [3, H, W].
ViewImage tensor_to_image(const torch::Tensor& t);
/// Accepts [1, 1, H, W] or [H, W]; values are clamped to [0,1].
SoftMask tensor_to_mask(const torch::Tensor& t);

/// Network inputs and targets for one or more samples, concatenated on N.
struct Batch {
  torch::Tensor sai;   // [N, 3UV, H, W]
  torch::Tensor fbs;   // [N, 1, H, W]
  torch::Tensor i_gt;  // [N, 3, H, W]
  torch::Tensor m_gt;  // [N, 1, H, W]
  int64_t size() const { return sai.size(0); }
};

Batch make_batch(const std::vector<const TrainSample*>& samples,
                 const std::vector<const FbsScoreMap*>& fbs);

/// Replicate-pads the last two dims up to multiples of `stride`.
torch::Tensor pad_to_multiple(const torch::Tensor& t, int stride);

}  // namespace isty::nn
