#include "isty/nn/loss.hpp"

#include <cmath>
#include <fstream>

#include "isty/error.hpp"

namespace isty::nn {

namespace {
// (torchvision index, in, out); a max-pool follows indices 2, 7 and 14
constexpr int kLayers[7][3] = {{0, 3, 64},    {2, 64, 64},   {5, 64, 128},  {7, 128, 128},
                               {10, 128, 256}, {12, 256, 256}, {14, 256, 256}};
}

Vgg16FeaturesImpl::Vgg16FeaturesImpl(uint64_t seed) {
  auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
  torch::NoGradGuard guard;
  for (const auto& [index, cin, cout] : kLayers) {
    auto conv = register_module("features_" + std::to_string(index),
                                torch::nn::Conv2d(torch::nn::Conv2dOptions(cin, cout, 3).padding(1)));
    conv->weight.normal_(0.0, std::sqrt(2.0 / (cin * 9)), gen);
    conv->bias.zero_();
    convs_.emplace_back(index, conv);
  }
  mean_ = register_buffer("mean", torch::tensor({0.485f, 0.456f, 0.406f}).view({1, 3, 1, 1}));
  std_ = register_buffer("std", torch::tensor({0.229f, 0.224f, 0.225f}).view({1, 3, 1, 1}));
  for (auto& p : parameters()) p.set_requires_grad(false);
}

std::vector<torch::Tensor> Vgg16FeaturesImpl::forward(const torch::Tensor& img) {
  auto x = (img - mean_.to(img.dtype())) / std_.to(img.dtype());
  std::vector<torch::Tensor> out;
  for (auto& [index, conv] : convs_) {
    x = torch::relu(conv->forward(x));
    if (index == 2 || index == 7 || index == 14) {
      x = torch::max_pool2d(x, 2, 2);
      out.push_back(x);
    }
  }
  return out;
}

void Vgg16FeaturesImpl::load_weights(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("cannot open feature weights " + file.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  c10::IValue value;
  try {
    value = torch::pickle_load(bytes);
  } catch (const c10::Error& e) {
    throw FormatError("feature weights " + file.string() + ": " + e.what_without_backtrace());
  }
  if (!value.isGenericDict()) throw FormatError("feature weights: expected a name -> tensor dict");
  auto dict = value.toGenericDict();
  auto fetch = [&](const std::string& key) {
    auto it = dict.find(key);
    if (it == dict.end() || !it->value().isTensor())
      throw FormatError("feature weights: missing " + key);
    return it->value().toTensor();
  };
  torch::NoGradGuard guard;
  for (auto& [index, conv] : convs_) {
    const std::string base = "features." + std::to_string(index);
    auto w = fetch(base + ".weight"), b = fetch(base + ".bias");
    if (!w.sizes().equals(conv->weight.sizes()) || !b.sizes().equals(conv->bias.sizes()))
      throw FormatError("feature weights: shape mismatch at " + base);
    conv->weight.copy_(w);
    conv->bias.copy_(b);
  }
}

torch::Tensor gram(const torch::Tensor& f) {
  const auto n = f.size(0), c = f.size(1), hw = f.size(2) * f.size(3);
  const auto flat = f.reshape({n, c, hw});
  return torch::bmm(flat, flat.transpose(1, 2)) / static_cast<double>(c * hw);
}

ImageLoss loss_image(const torch::Tensor& out, const torch::Tensor& gt, const LossWeights& w,
                     const FeatureFn& features) {
  if (!out.sizes().equals(gt.sizes())) throw ArgumentError("loss_image: shape mismatch");
  if (w.lambda1 < 0 || w.lambda2 < 0) throw ArgumentError("loss weights must be nonnegative");
  ImageLoss r;
  r.l1 = (out - gt).abs().mean();
  const auto fo = features(out);
  std::vector<torch::Tensor> fg;
  {
    torch::NoGradGuard guard;
    fg = features(gt);
  }
  r.perceptual = torch::zeros({}, out.options());
  r.style = torch::zeros({}, out.options());
  for (std::size_t l = 0; l < fo.size(); ++l) {
    r.perceptual = r.perceptual + (fo[l] - fg[l]).abs().mean();
    r.style = r.style + (gram(fo[l]) - gram(fg[l])).abs().mean();
  }
  r.total = r.l1 + w.lambda1 * r.perceptual + w.lambda2 * r.style;
  return r;
}

torch::Tensor loss_mask(const torch::Tensor& m, const torch::Tensor& m_gt) {
  if (!m.sizes().equals(m_gt.sizes())) throw ArgumentError("loss_mask: shape mismatch");
  return (m - m_gt).square().mean();
}

}  // namespace isty::nn
