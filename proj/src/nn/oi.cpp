#include "isty/error.hpp"
#include "isty/nn/models.hpp"

namespace isty::nn {

FusionImpl::FusionImpl(FusionKind kind, int lf_channels, int dc_channels, double gamma_init)
    : kind_(kind), dc_channels_(dc_channels) {
  const int cat = lf_channels + dc_channels;
  switch (kind_) {
    case FusionKind::conv1x1:
      conv_ = register_module("conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(cat, dc_channels, 1)));
      gamma = register_parameter("gamma", torch::full({1}, gamma_init));
      break;
    case FusionKind::sa_fusion:
      attention_ = register_module("attn", SelfAttention(cat, dc_channels, cat, gamma_init));
      break;
    case FusionKind::mf_fusion:
      // keys come from the reverse mask attention, which has the decoder's width
      attention_ = register_module("attn", SelfAttention(cat, dc_channels, dc_channels, gamma_init));
      break;
  }
}

torch::Tensor FusionImpl::forward(const torch::Tensor& f_lf, const torch::Tensor& f_dc,
                                  const torch::Tensor& a_rm) {
  if (f_lf.size(2) != f_dc.size(2) || f_lf.size(3) != f_dc.size(3))
    throw ArgumentError("fuse: feature maps differ in spatial size");
  if (f_dc.size(1) != dc_channels_) throw ConfigError("fuse: decoder width mismatch");
  const auto joined = torch::cat({f_lf, f_dc}, 1);
  switch (kind_) {
    case FusionKind::conv1x1: return f_dc + gamma * conv_->forward(joined);
    case FusionKind::sa_fusion: return attention_->forward(joined, f_dc);
    case FusionKind::mf_fusion: return attention_->forward(joined, f_dc, a_rm);
  }
  return f_dc;
}

OiImpl::OiImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto& w = cfg_.oi_widths;
  const int K = cfg_.K;
  for (int k = 1; k <= K; ++k) {
    const int cin = k == 1 ? 3 : w[k - 2];
    const int min = k == 1 ? 1 : w[k - 2];
    const std::string tag = std::to_string(k);
    enc_.push_back(register_module("enc" + tag,
        torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, w[k - 1], 4).stride(2).padding(1))));
    forward_steps_.push_back(register_module("mask" + tag, MaskStep(min, w[k - 1], cfg_.activation)));
    reverse_steps_.push_back(register_module("rmask" + tag, MaskStep(min, w[k - 1], cfg_.activation)));
  }
  for (int k = 1; k <= K; ++k) {
    const int cin = k == K ? w[K - 1] : 2 * w[k - 1];
    const int cout = k == 1 ? 3 : w[k - 2];
    dec_.push_back(register_module("dec" + std::to_string(k),
        torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(cin, cout, 4).stride(2).padding(1))));
  }
  fusion_.resize(K + 1, nullptr);
  for (int k = 1; k <= K; ++k)
    fusion_[k] = register_module("fuse" + std::to_string(k),
                                 Fusion(cfg_.fusion, cfg_.lfe_widths[k], w[k - 1], cfg_.gamma_init));
}

MaskChain OiImpl::mask_chain(const torch::Tensor& m) {
  MaskChain chain;
  auto fwd = m, rev = 1.0 - m;
  for (int k = 0; k < cfg_.K; ++k) {
    auto [a, next] = forward_steps_[k]->forward(fwd);
    auto [ra, rnext] = reverse_steps_[k]->forward(rev);
    chain.a_m.push_back(a);
    chain.a_rm.push_back(ra);
    fwd = next;
    rev = rnext;
  }
  return chain;
}

InpaintResult OiImpl::forward(const torch::Tensor& cv, const torch::Tensor& m,
                              const std::vector<torch::Tensor>& pyramid) {
  const int K = cfg_.K;
  if (static_cast<int>(pyramid.size()) != K + 1)
    throw ArgumentError("inpaint: pyramid depth does not match K");
  if (m.size(2) != cv.size(2) || m.size(3) != cv.size(3) || m.size(1) != 1)
    throw ArgumentError("inpaint: mask and center view differ in shape");
  cfg_.check_input(static_cast<int>(cv.size(3)), static_cast<int>(cv.size(2)));
  const double s = cfg_.leaky_slope;
  const MaskChain chain = mask_chain(m);

  std::vector<torch::Tensor> enc;  // f_ec^1..f_ec^K
  auto x = cv * m;
  for (int k = 0; k < K; ++k) {
    x = lrelu(enc_[k]->forward(x) * chain.a_m[k], s);
    enc.push_back(x);
  }

  auto y = lrelu(enc[K - 1] * chain.a_rm[K - 1], s);
  y = fusion_[K]->forward(pyramid[K], y, chain.a_rm[K - 1]);
  torch::Tensor pred;
  for (int k = K; k >= 1; --k) {
    const auto in = k == K ? y : torch::cat({y, enc[k - 1]}, 1);
    const auto up = dec_[k - 1]->forward(in);
    if (k == 1) {
      pred = torch::sigmoid(up);
      break;
    }
    y = lrelu(up * chain.a_rm[k - 2], s);
    y = fusion_[k - 1]->forward(pyramid[k - 1], y, chain.a_rm[k - 2]);
  }
  auto out = (m * cv + (1.0 - m) * pred).clamp(0.0, 1.0);
  return {out, pred};
}

}  // namespace isty::nn
