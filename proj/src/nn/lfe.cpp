#include "isty/error.hpp"
#include "isty/nn/models.hpp"

namespace isty::nn {

LfeImpl::LfeImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int c0 = cfg_.lfe_widths[0];
  const double s = cfg_.leaky_slope;
  stem_ = register_module("stem", torch::nn::Conv2d(torch::nn::Conv2dOptions(3 * cfg_.U * cfg_.V, c0, 1)));
  aspp1_ = register_module("aspp1", ResASPP(c0, s));
  res1_ = register_module("res1", ResBlock(c0, s));
  aspp2_ = register_module("aspp2", ResASPP(c0, s));
  res2_ = register_module("res2", ResBlock(c0, s));
  attention_.resize(cfg_.K + 1, nullptr);
  for (int k = 1; k <= cfg_.K; ++k) {
    const int cin = cfg_.lfe_widths[k - 1], cout = cfg_.lfe_widths[k];
    down_.push_back(register_module("down" + std::to_string(k),
        torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, cout, 4).stride(2).padding(1))));
    norm_.push_back(register_module("norm" + std::to_string(k), torch::nn::BatchNorm2d(cout)));
    if (k >= cfg_.attention_from)
      attention_[k] = register_module("attn" + std::to_string(k),
                                      SelfAttention(cout, cout, cout, cfg_.gamma_init));
  }
}

torch::Tensor LfeImpl::init_features(const torch::Tensor& sai) {
  if (sai.dim() != 4 || sai.size(1) != 3 * cfg_.U * cfg_.V)
    throw ConfigError("LFE expects " + std::to_string(3 * cfg_.U * cfg_.V) + " input channels");
  auto x = stem_->forward(sai);
  x = res1_->forward(aspp1_->forward(x));
  return res2_->forward(aspp2_->forward(x));
}

std::vector<torch::Tensor> LfeImpl::encode(const torch::Tensor& f0,
                                           std::vector<torch::Tensor>* pre_attention) {
  cfg_.check_input(static_cast<int>(f0.size(3)), static_cast<int>(f0.size(2)));
  std::vector<torch::Tensor> levels{f0};
  for (int k = 1; k <= cfg_.K; ++k) {
    auto x = norm_[k - 1]->forward(lrelu(down_[k - 1]->forward(levels.back()), cfg_.leaky_slope));
    if (pre_attention) pre_attention->push_back(x);
    if (attention_[k]) x = attention_[k]->forward(x);
    levels.push_back(x);
  }
  return levels;
}

}  // namespace isty::nn
