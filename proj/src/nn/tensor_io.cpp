#include "isty/nn/tensor_io.hpp"

#include <cstring>

#include "isty/error.hpp"

namespace isty::nn {

torch::Tensor lightfield_to_tensor(const LightField& lf) {
  const StackedViews s = to_sai_stack(lf);
  auto t = torch::empty({1, s.channels(), s.Y(), s.X()}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), s.data().data(), s.data().size_bytes());
  return t;
}

torch::Tensor image_to_tensor(const ViewImage& img) {
  auto t = torch::empty({img.height(), img.width(), 3}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), img.data().data(), img.data().size_bytes());
  return t.permute({2, 0, 1}).contiguous().unsqueeze(0);
}

torch::Tensor mask_to_tensor(const Raster<1>& m) {
  auto t = torch::empty({1, 1, m.height(), m.width()}, torch::kFloat32);
  std::memcpy(t.data_ptr<float>(), m.data().data(), m.data().size_bytes());
  return t;
}

ViewImage tensor_to_image(const torch::Tensor& t) {
  auto x = t.detach().to(torch::kCPU, torch::kFloat32);
  if (x.dim() == 4) {
    if (x.size(0) != 1) throw ArgumentError("tensor_to_image: batch of more than one image");
    x = x[0];
  }
  if (x.dim() != 3 || x.size(0) != 3) throw ArgumentError("tensor_to_image: expected 3 channels");
  x = x.permute({1, 2, 0}).contiguous();
  ViewImage img(static_cast<int>(x.size(1)), static_cast<int>(x.size(0)));
  std::memcpy(img.data().data(), x.data_ptr<float>(), img.data().size_bytes());
  return img;
}

SoftMask tensor_to_mask(const torch::Tensor& t) {
  auto x = t.detach().to(torch::kCPU, torch::kFloat32);
  while (x.dim() > 2) {
    if (x.size(0) != 1) throw ArgumentError("tensor_to_mask: expected a single-channel map");
    x = x[0];
  }
  x = x.contiguous();
  SoftMask m(static_cast<int>(x.size(1)), static_cast<int>(x.size(0)));
  std::memcpy(m.data().data(), x.data_ptr<float>(), m.data().size_bytes());
  m.clamp();
  return m;
}

Batch make_batch(const std::vector<const TrainSample*>& samples,
                 const std::vector<const FbsScoreMap*>& fbs) {
  if (samples.empty() || samples.size() != fbs.size())
    throw ArgumentError("make_batch: need one FBS map per sample");
  std::vector<torch::Tensor> sai, f, gt, m;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sai.push_back(lightfield_to_tensor(samples[i]->lf_occ));
    f.push_back(mask_to_tensor(fbs[i]->score));
    gt.push_back(image_to_tensor(samples[i]->i_gt));
    m.push_back(mask_to_tensor(samples[i]->m_gt));
  }
  try {
    return {torch::cat(sai), torch::cat(f), torch::cat(gt), torch::cat(m)};
  } catch (const c10::Error&) {
    throw ArgumentError("make_batch: samples differ in shape");
  }
}

torch::Tensor pad_to_multiple(const torch::Tensor& t, int stride) {
  const int64_t h = t.size(-2), w = t.size(-1);
  const int64_t ph = (stride - h % stride) % stride, pw = (stride - w % stride) % stride;
  if (ph == 0 && pw == 0) return t;
  namespace F = torch::nn::functional;
  return F::pad(t, F::PadFuncOptions({0, pw, 0, ph}).mode(torch::kReplicate));
}

}  // namespace isty::nn
