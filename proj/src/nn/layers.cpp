#include "isty/nn/layers.hpp"

#include <cmath>

#include "isty/error.hpp"

namespace isty::nn {

namespace F = torch::nn::functional;

void init_conv_weights(torch::nn::Module& m) {
  torch::NoGradGuard guard;
  for (auto& sub : m.modules(/*include_self=*/false)) {
    torch::Tensor w, b;
    if (auto* c = sub->as<torch::nn::Conv2d>()) {
      w = c->weight;
      b = c->bias;
    } else if (auto* t = sub->as<torch::nn::ConvTranspose2d>()) {
      w = t->weight;
      b = t->bias;
    } else {
      continue;
    }
    const double fan_in = static_cast<double>(w.numel() / w.size(0));
    w.normal_(0.0, std::sqrt(2.0 / fan_in));
    if (b.defined()) b.zero_();
  }
}

SelfAttentionImpl::SelfAttentionImpl(int in_channels, int out_channels, int key_channels,
                                     double gamma_init) {
  const int inner = std::max(1, in_channels / 8);
  query_ = register_module("query", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_channels, inner, 1)));
  key_ = register_module("key", torch::nn::Conv2d(torch::nn::Conv2dOptions(key_channels, inner, 1)));
  value_ = register_module("value", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_channels, out_channels, 1)));
  gamma = register_parameter("gamma", torch::full({1}, gamma_init));
}

torch::Tensor SelfAttentionImpl::attention(const torch::Tensor& x,
                                           const std::optional<torch::Tensor>& key_source) {
  const torch::Tensor& src = key_source ? *key_source : x;
  if (src.size(2) != x.size(2) || src.size(3) != x.size(3))
    throw ArgumentError("self_attention: key source must match the input spatially");
  const auto n = x.size(0);
  const auto q = query_->forward(x).flatten(2);   // [N, C', HW]
  const auto k = key_->forward(src).flatten(2);   // [N, C', HW]
  const auto energy = torch::bmm(q.transpose(1, 2), k);
  return torch::softmax(energy, -1).view({n, q.size(2), k.size(2)});
}

torch::Tensor SelfAttentionImpl::forward(const torch::Tensor& x, const torch::Tensor& residual,
                                         const std::optional<torch::Tensor>& key_source) {
  const auto attn = attention(x, key_source);
  const auto v = value_->forward(x).flatten(2);  // [N, Cv, HW]
  auto out = torch::bmm(v, attn.transpose(1, 2)).view_as(residual);
  return residual + gamma * out;
}

ResASPPImpl::ResASPPImpl(int channels, double slope) : slope_(slope) {
  for (int rate : {1, 2, 4, 8})
    branches_->push_back(torch::nn::Conv2d(
        torch::nn::Conv2dOptions(channels, channels, 3).padding(rate).dilation(rate)));
  register_module("branches", branches_);
  fuse_ = register_module("fuse", torch::nn::Conv2d(torch::nn::Conv2dOptions(4 * channels, channels, 1)));
}

torch::Tensor ResASPPImpl::forward(const torch::Tensor& x) {
  std::vector<torch::Tensor> outs;
  for (auto& b : *branches_) outs.push_back(lrelu(b->as<torch::nn::Conv2d>()->forward(x), slope_));
  return x + fuse_->forward(torch::cat(outs, 1));
}

ResBlockImpl::ResBlockImpl(int channels, double slope) : slope_(slope) {
  auto conv = [&] { return torch::nn::Conv2d(torch::nn::Conv2dOptions(channels, channels, 3).padding(1)); };
  c1_ = register_module("c1", conv());
  c2_ = register_module("c2", conv());
  c3_ = register_module("c3", conv());
}

torch::Tensor ResBlockImpl::forward(const torch::Tensor& x) {
  auto y = lrelu(c1_->forward(x), slope_);
  y = lrelu(c2_->forward(y), slope_);
  return x + c3_->forward(y);
}

MaskActivationFnImpl::MaskActivationFnImpl(MaskActivation kind) : kind_(kind) {
  if (kind_ == MaskActivation::gaussian) {
    rho_ = register_parameter("rho", torch::full({1}, std::log(std::exp(0.1) - 1.0)));  // mu = 1.1
    s_ = register_parameter("s", torch::full({1}, std::log(std::exp(2.0) - 1.0)));     // gamma = 2
  } else {
    rho_ = register_parameter("rho", torch::zeros({1}));                   // b = 0.5
    s_ = register_parameter("s", torch::full({1}, 8.0));                   // a ~ 8
  }
}

torch::Tensor MaskActivationFnImpl::forward(const torch::Tensor& m) {
  if (kind_ == MaskActivation::gaussian) {
    // Rising flank of a Gaussian centred beyond the valid range, scaled so
    // that m = 1 maps to 1: exp(-g ((m - mu)^2 - (1 - mu)^2)).  Strictly
    // increasing on [0,1], so no mask level is cut off from the gradient.
    const auto mu = 1.0 + F::softplus(rho_);
    const auto g = F::softplus(s_);
    return torch::exp(-g * (1.0 - m) * (2.0 * mu - 1.0 - m));
  }
  const auto b = torch::sigmoid(rho_);
  const auto a = F::softplus(s_);
  return (torch::sigmoid(a * (m - b)) / torch::sigmoid(a * (1.0 - b))).clamp_max(1.0);
}

MaskStepImpl::MaskStepImpl(int in_channels, int out_channels, MaskActivation kind) {
  weight_ = register_parameter("weight", torch::randn({out_channels, in_channels, 4, 4}) * 0.1);
  activation_ = register_module("activation", MaskActivationFn(kind));
}

std::pair<torch::Tensor, torch::Tensor> MaskStepImpl::forward(const torch::Tensor& mask_features) {
  const auto w = F::softplus(weight_);
  const auto opts = F::Conv2dFuncOptions().stride(2).padding(1);
  const auto num = F::conv2d(mask_features, w, opts);
  const auto den = F::conv2d(torch::ones_like(mask_features), w, opts);
  const auto m = num / den;  // weighted mean of the valid inputs, in [0,1]
  const auto a = activation_->forward(m);
  const auto updated = m.clamp_min(1e-6).pow(0.8);
  return {a, updated};
}

}  // namespace isty::nn
