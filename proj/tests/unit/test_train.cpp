#include <cmath>
#include <fstream>

#include "torch_doctest.hpp"
#include "helpers.hpp"
#include "isty/error.hpp"
#include "isty/nn/train.hpp"
#include "nn_helpers.hpp"
#include "oracles.hpp"

using namespace isty;
using namespace isty::nn;
using isty::testing::synthetic_samples;
using isty::testing::tiny_train_config;

namespace {

// Torch twin of the toy pyramid in oracles.hpp.
std::vector<torch::Tensor> toy_features(const torch::Tensor& x) {
  namespace t = isty::oracle::toy;
  auto w = torch::tensor({t::W[0][0], t::W[0][1], t::W[0][2], t::W[1][0], t::W[1][1], t::W[1][2]},
                         x.options()).view({2, 3, 1, 1});
  auto b = torch::tensor({t::B[0], t::B[1]}, x.options());
  auto f1 = torch::relu(torch::conv2d(x, w, b));
  return {f1, torch::avg_pool2d(f1, 2)};
}

using Img = isty::oracle::toy::Img;
using isty::oracle::toy::image_loss;

bool params_equal(IstyNet& a, IstyNet& b) {
  auto pa = a->named_parameters(), pb = b->named_parameters();
  for (const auto& p : pa)
    if (!torch::equal(p.value(), pb[p.key()])) return false;
  auto ba = a->named_buffers(), bb = b->named_buffers();
  for (const auto& p : ba)
    if (!torch::equal(p.value(), bb[p.key()])) return false;
  return true;
}

}  // namespace

TEST_CASE("image loss") {
  Rng rng(2);
  Img a(48), b(48);
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform();
  auto ta = torch::tensor(a, torch::kFloat64).view({1, 3, 4, 4});
  auto tb = torch::tensor(b, torch::kFloat64).view({1, 3, 4, 4});
  const LossWeights w;
  SUBCASE("defaults") {
    CHECK(w.lambda1 == 0.01);
    CHECK(w.lambda2 == 120.0);
  }
  SUBCASE("matches a scalar evaluation") {
    auto r = loss_image(ta, tb, w, toy_features);
    CHECK(std::abs(r.total.item<double>() - image_loss(a, b, 0.01, 120.0)) < 1e-6);
    CHECK(r.total.item<double>() ==
          doctest::Approx(r.l1.item<double>() + 0.01 * r.perceptual.item<double>() +
                          120.0 * r.style.item<double>()).epsilon(1e-12));
  }
  SUBCASE("with the mask term") {
    Rng r2(3);
    std::vector<double> m(16), mg(16);
    double mse = 0;
    for (int i = 0; i < 16; ++i) {
      m[i] = r2.uniform();
      mg[i] = r2.coin() ? 1.0 : 0.0;
      mse += (m[i] - mg[i]) * (m[i] - mg[i]) / 16;
    }
    auto lm = loss_mask(torch::tensor(m, torch::kFloat64).view({1, 1, 4, 4}),
                        torch::tensor(mg, torch::kFloat64).view({1, 1, 4, 4}));
    const double total = loss_image(ta, tb, w, toy_features).total.item<double>() + lm.item<double>();
    CHECK(std::abs(total - (image_loss(a, b, 0.01, 120.0) + mse)) < 1e-6);
  }
  SUBCASE("identical images") {
    auto r = loss_image(ta, ta, w, toy_features);
    CHECK(r.total.item<double>() == 0.0);
  }
  SUBCASE("constant offset") {
    auto r = loss_image(ta * 0.5 + 0.1, ta * 0.5, w, toy_features);
    CHECK(r.l1.item<double>() == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("VGG pyramid") {
    Vgg16Features vgg(0);
    auto img = torch::rand({1, 3, 32, 32});
    auto f = vgg->forward(img);
    REQUIRE(f.size() == 3);
    CHECK(f[0].sizes() == torch::IntArrayRef({1, 64, 16, 16}));
    CHECK(f[2].sizes() == torch::IntArrayRef({1, 256, 4, 4}));
    for (const auto& p : vgg->parameters()) CHECK(!p.requires_grad());
    auto fn = [&](const torch::Tensor& x) { return vgg->forward(x); };
    auto r = loss_image(img, torch::rand({1, 3, 32, 32}), w, fn);
    CHECK(r.perceptual.item<double>() > 0);
    CHECK(r.style.item<double>() > 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(loss_image(ta, tb.narrow(3, 0, 2), w, toy_features), ArgumentError);
    CHECK_THROWS_AS(loss_mask(torch::zeros({1, 1, 4, 4}), torch::zeros({1, 1, 4, 3})), ArgumentError);
  }
}

TEST_CASE("mask loss examples") {
  auto zeros = torch::zeros({1, 1, 4, 4}), ones = torch::ones({1, 1, 4, 4});
  CHECK(loss_mask(ones, ones).item<float>() == 0.0f);
  CHECK(loss_mask(zeros, ones).item<float>() == 1.0f);
  auto half = torch::cat({torch::zeros({1, 1, 2, 4}), torch::ones({1, 1, 2, 4})}, 2);
  CHECK(loss_mask(half, ones).item<float>() == 0.5f);
}

TEST_CASE("pretrained feature weights load from a pickled dictionary") {
  isty::testing::TempDir tmp("vgg");
  Vgg16Features src(5), dst(9);
  c10::Dict<std::string, torch::Tensor> dict;
  for (const auto& p : src->named_parameters()) {
    // "features_0.weight" -> "features.0.weight"
    std::string key = p.key();
    key[8] = '.';
    dict.insert(key, p.value());
  }
  const auto bytes = torch::pickle_save(c10::IValue(dict));
  std::ofstream(tmp.path() / "vgg.pt", std::ios::binary).write(bytes.data(), bytes.size());
  dst->load_weights(tmp.path() / "vgg.pt");
  auto x = torch::rand({1, 3, 16, 16});
  auto a = src->forward(x), b = dst->forward(x);
  for (int l = 0; l < 3; ++l) CHECK(torch::equal(a[l], b[l]));
  CHECK_THROWS_AS(dst->load_weights(tmp.path() / "missing.pt"), LoadError);
}

TEST_CASE("training configuration") {
  SUBCASE("defaults") {
    TrainConfig c;
    CHECK(c.lr == 5e-4);
    CHECK(c.beta1 == 0.5);
    CHECK(c.beta2 == 0.9);
    CHECK(c.batch == 16);
    CHECK(c.epochs == 500);
    CHECK(c.loss.lambda1 == 0.01);
    CHECK(c.loss.lambda2 == 120.0);
  }
  SUBCASE("json round trip") {
    TrainConfig c = tiny_train_config();
    c.model.fusion = FusionKind::mf_fusion;
    c.data_dir = "x";
    auto back = TrainConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.model == c.model);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(TrainConfig::from_json("{\"bogus\": 1}"), ConfigError);
    CHECK_THROWS_AS(TrainConfig::from_json("{\"batch\": 0}"), ConfigError);
    CHECK_THROWS_AS(TrainConfig::from_json("{\"K\": 3}"), ConfigError);
    CHECK_THROWS_AS(TrainConfig::from_json("[1,2]"), ConfigError);
  }
  SUBCASE("FBS candidates") {
    auto f = TrainConfig{}.fbs();
    CHECK(f.candidates == FbsConfig{}.candidates);
  }
}

TEST_CASE("learning-rate schedule") {
  Trainer t(tiny_train_config(), synthetic_samples(1, 32, 24, 1));
  CHECK(t.lr_for_epoch(0) == 5e-4);
  CHECK(t.lr_for_epoch(199) == 5e-4);
  CHECK(t.lr_for_epoch(200) == 2.5e-4);
  CHECK(t.lr_for_epoch(399) == 2.5e-4);
  CHECK(t.lr_for_epoch(400) == 1.25e-4);
}

TEST_CASE("train_step") {
  auto data = synthetic_samples(4, 40, 32, 3);
  SUBCASE("zero learning rate leaves parameters unchanged") {
    auto cfg = tiny_train_config();
    cfg.lr = 0.0;
    Trainer t(cfg, data);
    std::vector<torch::Tensor> before;
    for (const auto& p : t.net()->parameters()) before.push_back(p.detach().clone());
    t.run_epoch();
    auto after = t.net()->parameters();
    for (std::size_t i = 0; i < before.size(); ++i) REQUIRE(torch::equal(before[i], after[i]));
  }
  SUBCASE("identical seeds give identical trajectories") {
    auto cfg = tiny_train_config();
    cfg.epochs = 5;
    std::vector<double> a, b;
    Trainer t1(cfg, data);
    t1.train([&](const StepMetrics& m) { a.push_back(m.total); });
    Trainer t2(cfg, data);
    t2.train([&](const StepMetrics& m) { b.push_back(m.total); });
    REQUIRE(a.size() == 10);
    CHECK(a == b);
    for (double v : a) CHECK(std::isfinite(v));
  }
  SUBCASE("non-finite values are reported by name") {
    Trainer t(tiny_train_config(), data);
    {
      torch::NoGradGuard g;
      t.net()->lfe->named_parameters()["stem.bias"][0] = std::numeric_limits<float>::quiet_NaN();
    }
    try {
      t.run_epoch();
      FAIL("expected a non-finite error");
    } catch (const NonFiniteError& e) {
      CHECK(e.tensor() == "f^0");
    }
  }
  SUBCASE("empty data") { CHECK_THROWS_AS(Trainer(tiny_train_config(), {}), ConfigError); }
  SUBCASE("metrics log") {
    isty::testing::TempDir tmp("log");
    Trainer t(tiny_train_config(), data);
    t.set_metrics_log(tmp.path() / "m.csv");
    t.run_epoch();
    std::ifstream in(tmp.path() / "m.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "step,epoch,lr,l1,perceptual,style,loss_image,loss_mask,total");
    int rows = 0;
    while (std::getline(in, row)) ++rows;
    CHECK(rows == 2);
  }
}

TEST_CASE("checkpoint") {
  isty::testing::TempDir tmp("ckpt");
  auto data = synthetic_samples(4, 40, 32, 4);
  auto cfg = tiny_train_config();
  SUBCASE("round trip is exact") {
    Trainer a(cfg, data);
    a.run_epoch();
    a.run_epoch();
    a.save_checkpoint(tmp.path() / "a.pt");
    auto cfg2 = cfg;
    cfg2.seed = 99;  // different initialization, overwritten by the load
    Trainer b(cfg2, data);
    b.load_checkpoint(tmp.path() / "a.pt");
    CHECK(params_equal(a.net(), b.net()));
    CHECK(a.epoch() == b.epoch());
    CHECK(a.step() == b.step());
    CHECK(a.data_rng().state() == b.data_rng().state());
    const auto& ga = a.optimizer().param_groups()[0].params();
    const auto& gb = b.optimizer().param_groups()[0].params();
    REQUIRE(ga.size() == gb.size());
    for (std::size_t i = 0; i < ga.size(); ++i) {
      auto& sa = static_cast<torch::optim::AdamParamState&>(
          *a.optimizer().state().at(ga[i].unsafeGetTensorImpl()));
      auto& sb = static_cast<torch::optim::AdamParamState&>(
          *b.optimizer().state().at(gb[i].unsafeGetTensorImpl()));
      REQUIRE(torch::equal(sa.exp_avg(), sb.exp_avg()));
      REQUIRE(torch::equal(sa.exp_avg_sq(), sb.exp_avg_sq()));
      REQUIRE(sa.step() == sb.step());
    }
  }
  SUBCASE("resume reproduces the uninterrupted run") {
    std::vector<double> full, resumed;
    Trainer a(cfg, data);
    a.train([&](const StepMetrics& m) { full.push_back(m.total); });

    auto half = cfg;
    half.epochs = 2;
    Trainer b(half, data);
    b.train();
    b.save_checkpoint(tmp.path() / "half.pt");
    Trainer c(cfg, data);
    c.load_checkpoint(tmp.path() / "half.pt");
    c.train([&](const StepMetrics& m) { resumed.push_back(m.total); });
    REQUIRE(full.size() == 8);
    REQUIRE(resumed.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(resumed[i] == full[4 + i]);
  }
  SUBCASE("format version and configuration are checked") {
    torch::serialize::OutputArchive ar;
    ar.write("format_version", c10::IValue(int64_t{kCheckpointVersion + 1}));
    ar.save_to((tmp.path() / "future.pt").string());
    Trainer t(cfg, data);
    CHECK_THROWS_AS(t.load_checkpoint(tmp.path() / "future.pt"), FormatError);
    CHECK_THROWS_AS(load_model(tmp.path() / "future.pt"), FormatError);
    CHECK_THROWS_AS(load_model(tmp.path() / "absent.pt"), LoadError);

    t.save_checkpoint(tmp.path() / "t.pt");
    auto other = cfg;
    other.model.oi_widths = {8, 8, 16};
    Trainer u(other, data);
    CHECK_THROWS_AS(u.load_checkpoint(tmp.path() / "t.pt"), ConfigError);
  }
  SUBCASE("load_model gives an inference network") {
    Trainer t(cfg, data);
    t.run_epoch();
    t.save_checkpoint(tmp.path() / "m.pt");
    auto m = load_model(tmp.path() / "m.pt");
    CHECK(!m.net->is_training());
    CHECK(m.epoch == 1);
    CHECK(params_equal(t.net(), m.net));
  }
}

TEST_CASE("gradients") {
  auto data = synthetic_samples(2, 32, 24, 5);
  auto cfg = tiny_train_config();
  SUBCASE("analytic gradient matches central differences") {
    torch::manual_seed(21);
    IstyNet net(cfg.model);
    net->to(torch::kFloat64);
    net->train();
    Vgg16Features vgg(0);
    vgg->to(torch::kFloat64);
    FeatureFn feats = [&](const torch::Tensor& x) { return vgg->forward(x); };
    Trainer holder(cfg, data);
    Batch b = holder.plain_batch({0, 1});
    b.sai = b.sai.to(torch::kFloat64);
    b.fbs = b.fbs.to(torch::kFloat64);
    b.i_gt = b.i_gt.to(torch::kFloat64);
    b.m_gt = b.m_gt.to(torch::kFloat64);
    auto total = [&] {
      auto r = net->forward(b.sai, b.fbs);
      return loss_image(r.out, b.i_gt, cfg.loss, feats).total + loss_mask(r.mask, b.m_gt);
    };
    net->zero_grad();
    total().backward();

    auto params = net->named_parameters();
    Rng rng(8);
    int checked = 0;
    double worst = 0.0;
    while (checked < 20) {
      const auto& item = params[static_cast<std::size_t>(rng.uniform_int(0, params.size() - 1))];
      auto p = item.value();
      const auto idx = rng.uniform_int(0, p.numel() - 1);
      auto flat = p.detach().view({-1});
      const double analytic = p.grad().view({-1})[idx].item<double>();
      const double orig = flat[idx].item<double>();
      const double h = 1e-6;
      double fp, fm;
      {
        torch::NoGradGuard g;
        flat[idx] = orig + h;
        fp = total().item<double>();
        flat[idx] = orig - h;
        fm = total().item<double>();
        flat[idx] = orig;
      }
      const double numeric = (fp - fm) / (2 * h);
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      const double err = scale < 1e-7 ? 0.0 : std::abs(analytic - numeric) / scale;
      if (scale < 1e-7) CHECK(std::abs(analytic - numeric) < 1e-9);
      INFO(item.key() << "[" << idx << "] analytic " << analytic << " numeric " << numeric);
      CHECK(err <= 1e-2);
      worst = std::max(worst, err);
      ++checked;
    }
    MESSAGE("worst relative error " << worst);
  }
  SUBCASE("one step reaches nearly every parameter") {
    Trainer t(cfg, data);
    Batch b = t.plain_batch({0, 1});
    t.train_step(b);
    int64_t total = 0, live = 0;
    for (const auto& p : t.net()->named_parameters()) {
      auto g = p.value().grad();
      REQUIRE(g.defined());
      total += g.numel();
      live += (torch::isfinite(g) & (g != 0)).sum().item<int64_t>();
    }
    MESSAGE("nonzero finite gradient fraction " << double(live) / total);
    CHECK(double(live) / total >= 0.99);
  }
}
