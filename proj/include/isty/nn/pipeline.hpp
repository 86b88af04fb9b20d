#pragma once

#include "isty/fbs.hpp"
#include "isty/mask_ops.hpp"
#include "isty/nn/models.hpp"

namespace isty::nn {

/// Inference wrapper around a trained network.  Frames of any size are
/// replicate-padded to a multiple of 2^K and cropped back.  Calls are safe
/// from several threads once the parameters are no longer modified.
class DeoccPipeline : public Deoccluder {
 public:
  DeoccPipeline(IstyNet net, FbsConfig fbs);

  /// M_OMG for the light field as given (zero disparity separates).
  SoftMask generate(const LightField& lf) const override;
  /// Inpaints the center view under an arbitrary mask.
  ViewImage inpaint(const LightField& lf, const SoftMask& mask) const override;

  struct Result {
    SoftMask mask;
    ViewImage out;
  };
  Result run(const LightField& lf) const;

  const ModelConfig& config() const { return net_->config(); }
  const FbsConfig& fbs_config() const { return fbs_; }

 private:
  torch::Tensor padded_sai(const LightField& lf) const;
  mutable IstyNet net_;
  FbsConfig fbs_;
};

}  // namespace isty::nn
