#include "isty/error.hpp"
#include "isty/nn/models.hpp"

namespace isty::nn {

namespace {

torch::nn::Conv2d conv3(int cin, int cout) {
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, cout, 3).padding(1));
}
torch::nn::Conv2d conv1(int cin, int cout) {
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, cout, 1));
}
torch::nn::Conv2d down(int cin, int cout) {
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, cout, 4).stride(2).padding(1));
}
torch::nn::ConvTranspose2d up(int cin, int cout) {
  return torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(cin, cout, 4).stride(2).padding(1));
}

void require_size(const torch::Tensor& t, int64_t h, int64_t w, const char* what) {
  if (t.size(2) != h || t.size(3) != w)
    throw ArgumentError(std::string("mask generator: ") + what + " has the wrong spatial size");
}

}  // namespace

OmgImpl::OmgImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto& w = cfg_.omg_widths;
  const auto& f = cfg_.lfe_widths;
  e0a_ = register_module("e0a", conv3(4, w[0]));
  e0b_ = register_module("e0b", conv3(w[0], w[0]));
  e1_ = register_module("e1", down(w[0], w[1]));
  e2_ = register_module("e2", down(w[1], w[2]));
  p0_ = register_module("p0", conv1(f[0], w[0]));
  p1_ = register_module("p1", conv1(f[1], w[1]));
  p2_ = register_module("p2", conv1(f[2], w[2]));
  d2_ = register_module("d2", conv3(2 * w[2], w[2]));
  u2_ = register_module("u2", up(w[2], w[1]));
  d1_ = register_module("d1", conv3(3 * w[1], w[1]));
  u1_ = register_module("u1", up(w[1], w[0]));
  d0_ = register_module("d0", conv3(3 * w[0], w[0]));
  head_ = register_module("head", conv3(w[0], 2));
}

torch::Tensor OmgImpl::logits(const torch::Tensor& fbs, const torch::Tensor& cv,
                              const std::vector<torch::Tensor>& pyramid) {
  if (pyramid.size() < 3) throw ArgumentError("mask generator needs f^0..f^2");
  const int64_t h = cv.size(2), w = cv.size(3);
  require_size(fbs, h, w, "FBS map");
  require_size(pyramid[0], h, w, "f^0");
  require_size(pyramid[1], h / 2, w / 2, "f^1");
  require_size(pyramid[2], h / 4, w / 4, "f^2");
  const double s = cfg_.leaky_slope;

  auto e0 = lrelu(e0b_->forward(lrelu(e0a_->forward(torch::cat({cv, fbs}, 1)), s)), s);
  auto e1 = lrelu(e1_->forward(e0), s);
  auto e2 = lrelu(e2_->forward(e1), s);

  auto x = lrelu(d2_->forward(torch::cat({e2, p2_->forward(pyramid[2])}, 1)), s);
  x = lrelu(u2_->forward(x), s);
  x = lrelu(d1_->forward(torch::cat({x, e1, p1_->forward(pyramid[1])}, 1)), s);
  x = lrelu(u1_->forward(x), s);
  x = lrelu(d0_->forward(torch::cat({x, e0, p0_->forward(pyramid[0])}, 1)), s);
  return head_->forward(x);
}

torch::Tensor OmgImpl::forward(const torch::Tensor& fbs, const torch::Tensor& cv,
                               const std::vector<torch::Tensor>& pyramid) {
  // channel 1 is the background class
  return torch::softmax(logits(fbs, cv, pyramid), 1).narrow(1, 1, 1);
}

}  // namespace isty::nn
