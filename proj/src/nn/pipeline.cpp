#include "isty/nn/pipeline.hpp"

#include "isty/error.hpp"
#include "isty/nn/tensor_io.hpp"

namespace isty::nn {

DeoccPipeline::DeoccPipeline(IstyNet net, FbsConfig fbs) : net_(std::move(net)), fbs_(std::move(fbs)) {
  net_->eval();
}

torch::Tensor DeoccPipeline::padded_sai(const LightField& lf) const {
  const auto& cfg = net_->config();
  if (lf.U() != cfg.U || lf.V() != cfg.V)
    throw ConfigError("light field is " + std::to_string(lf.U()) + "x" + std::to_string(lf.V()) +
                      " views but the model expects " + std::to_string(cfg.U) + "x" +
                      std::to_string(cfg.V));
  return pad_to_multiple(lightfield_to_tensor(lf), cfg.stride());
}

namespace {
torch::Tensor crop(const torch::Tensor& t, int width, int height) {
  return t.narrow(2, 0, height).narrow(3, 0, width);
}
}  // namespace

SoftMask DeoccPipeline::generate(const LightField& lf) const {
  torch::NoGradGuard guard;
  const auto sai = padded_sai(lf);
  const auto fbs = pad_to_multiple(mask_to_tensor(compute_fbs(lf, fbs_).score), net_->config().stride());
  const auto pyramid = net_->lfe->forward(sai);
  const auto m = net_->omg->forward(fbs, net_->center_view(sai), pyramid);
  return tensor_to_mask(crop(m, lf.X(), lf.Y()));
}

ViewImage DeoccPipeline::inpaint(const LightField& lf, const SoftMask& mask) const {
  if (mask.width() != lf.X() || mask.height() != lf.Y())
    throw ArgumentError("inpaint: mask does not match the light field");
  torch::NoGradGuard guard;
  const auto sai = padded_sai(lf);
  const auto m = pad_to_multiple(mask_to_tensor(mask), net_->config().stride());
  return tensor_to_image(crop(net_->inpaint(sai, m).out, lf.X(), lf.Y()));
}

DeoccPipeline::Result DeoccPipeline::run(const LightField& lf) const {
  torch::NoGradGuard guard;
  const auto sai = padded_sai(lf);
  const auto fbs = pad_to_multiple(mask_to_tensor(compute_fbs(lf, fbs_).score), net_->config().stride());
  const auto r = net_->forward(sai, fbs);
  return {tensor_to_mask(crop(r.mask, lf.X(), lf.Y())), tensor_to_image(crop(r.out, lf.X(), lf.Y()))};
}

}  // namespace isty::nn
