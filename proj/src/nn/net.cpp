#include "isty/error.hpp"
#include "isty/nn/models.hpp"

namespace isty::nn {

IstyNetImpl::IstyNetImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  lfe = register_module("lfe", Lfe(cfg_));
  omg = register_module("omg", Omg(cfg_));
  oi = register_module("oi", Oi(cfg_));
  init_conv_weights(*this);
}

void IstyNetImpl::check(const torch::Tensor& sai) const {
  if (sai.dim() != 4 || sai.size(1) != 3 * cfg_.U * cfg_.V)
    throw ConfigError("input does not match the configured angular size");
  cfg_.check_input(static_cast<int>(sai.size(3)), static_cast<int>(sai.size(2)));
}

torch::Tensor IstyNetImpl::center_view(const torch::Tensor& sai) const {
  const int uc = (cfg_.U - 1) / 2, vc = (cfg_.V - 1) / 2;
  return sai.narrow(1, 3 * (vc * cfg_.U + uc), 3);
}

NetOutput IstyNetImpl::forward(const torch::Tensor& sai, const torch::Tensor& fbs) {
  check(sai);
  NetOutput r;
  const auto cv = center_view(sai);
  r.pyramid = lfe->forward(sai);
  r.mask = omg->forward(fbs, cv, r.pyramid);
  auto inp = oi->forward(cv, r.mask, r.pyramid);
  r.out = inp.out;
  r.pred = inp.pred;
  return r;
}

InpaintResult IstyNetImpl::inpaint(const torch::Tensor& sai, const torch::Tensor& mask) {
  check(sai);
  return oi->forward(center_view(sai), mask, lfe->forward(sai));
}

}  // namespace isty::nn
