// Command-line front end: synthesize data, train, evaluate, serve.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <torch/torch.h>

#include "CLI11.hpp"
#include "isty/error.hpp"
#include "isty/evaluation.hpp"
#include "isty/lightfield_io.hpp"
#include "isty/nn/pipeline.hpp"
#include "isty/nn/train.hpp"
#include "isty/occlusion_synth.hpp"
#include "isty/rng.hpp"
#include "isty/service.hpp"
#include "isty/synthetic.hpp"

namespace fs = std::filesystem;
using namespace isty;

namespace {

struct SynthArgs {
  std::string mode = "train";
  fs::path out, clean, templates;
  int count = 16;
  int width = 300, height = 200;
  std::uint64_t seed = 0;
};

// Clean light fields: every view_dir scene under `dir`, cropped to 5x5 and
// resized, or procedural planes when no directory is given.
std::vector<LightField> clean_fields(const SynthArgs& a) {
  std::vector<LightField> out;
  if (a.clean.empty()) {
    for (int i = 0; i < a.count; ++i)
      out.push_back(make_clean_scene(mix_seed(a.seed, 1000 + i), 5, 5, a.width, a.height,
                                     Rng(mix_seed(a.seed, 2000 + i)).uniform(-3.0, -0.5)));
    return out;
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(a.clean))
    if (e.is_directory() && fs::exists(e.path() / "meta.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw LoadError("no light fields under " + a.clean.string());
  for (const auto& d : dirs) {
    LightField lf = load_lightfield(d, LightFieldFormat::view_dir);
    if (lf.U() > 5 || lf.V() > 5) lf = central_crop_angular(lf, 5, 5);
    out.push_back(resize_spatial(lf, a.width, a.height));
  }
  return out;
}

int run_synth(const SynthArgs& a) {
  const TemplatePool pool = a.templates.empty()
                                ? make_procedural_templates(mix_seed(a.seed, 7), 24, a.height / 8, a.height / 2)
                                : load_template_pool(a.templates);
  const auto clean = clean_fields(a);
  fs::create_directories(a.out);
  std::vector<TrainSample> samples;
  if (a.mode == "train") {
    EmbedConfig cfg;
    cfg.frame_width = a.width;
    cfg.frame_height = a.height;
    for (int i = 0; i < a.count; ++i) {
      const LightField& lf = clean[i % clean.size()];
      samples.push_back(make_train_sample(lf, sample_embed_spec(mix_seed(a.seed, i), cfg, pool), pool));
      char name[32];
      std::snprintf(name, sizeof name, "train_%05d", i);
      samples.back().name = name;
    }
  } else {
    const TestMode mode = a.mode == "single" ? TestMode::single : TestMode::double_occ;
    samples = make_test_set(clean, mode, a.seed, pool);
  }
  for (const auto& s : samples) save_train_sample(a.out / s.name, s);
  std::cerr << "wrote " << samples.size() << " samples to " << a.out << "\n";
  return 0;
}

int run_train(const fs::path& config, const fs::path& resume) {
  nn::TrainConfig cfg = nn::TrainConfig::from_file(config);
  if (cfg.data_dir.empty() || cfg.out_dir.empty()) throw ConfigError("config needs data_dir and out_dir");
  auto data = nn::load_sample_dir(cfg.data_dir);
  std::cerr << "loaded " << data.size() << " samples from " << cfg.data_dir << "\n";
  fs::create_directories(cfg.out_dir);
  nn::Trainer trainer(cfg, std::move(data));
  if (!resume.empty()) {
    trainer.load_checkpoint(resume);
    std::cerr << "resumed at epoch " << trainer.epoch() << ", step " << trainer.step() << "\n";
  }
  trainer.set_metrics_log(fs::path(cfg.out_dir) / "metrics.csv");
  trainer.train([](const nn::StepMetrics& m) {
    if (m.step % 50 == 0)
      std::fprintf(stderr, "epoch %d step %lld lr %.3g total %.5f (image %.5f, mask %.5f)\n", m.epoch,
                   static_cast<long long>(m.step), m.lr, m.total, m.loss_image, m.loss_mask);
  });
  std::cerr << "done; checkpoints in " << cfg.out_dir << "\n";
  return 0;
}

int run_eval(const fs::path& ckpt, const std::string& baseline, const fs::path& data, const fs::path& out,
             const std::string& title) {
  const auto samples = nn::load_sample_dir(data);
  if (samples.empty()) throw LoadError("no samples under " + data.string());
  Predictor predict;
  if (baseline == "identity") {
    predict = identity_predictor();
  } else if (baseline == "oracle") {
    predict = oracle_predictor();
  } else {
    auto pipe = std::make_shared<nn::DeoccPipeline>(nn::load_pipeline(ckpt));
    predict = [pipe](const TrainSample& s) { return pipe->run(s.lf_occ).out; };
  }
  const EvalReport report = evaluate_set(samples, predict);
  std::cout << report.to_table(title);
  if (!out.empty()) std::ofstream(out) << report.to_json() << "\n";
  return 0;
}

HttpService* g_http = nullptr;

int run_serve(const fs::path& ckpt, const std::string& host, int port, int ttl_minutes) {
  auto pipe = std::make_shared<nn::DeoccPipeline>(nn::load_pipeline(ckpt));
  ServiceOptions opts;
  opts.ttl = std::chrono::minutes(ttl_minutes);
  SessionManager sessions(pipe, opts);
  HttpService http(sessions);
  const int bound = http.bind(host, port);
  g_http = &http;
  std::signal(SIGINT, [](int) {
    if (g_http) g_http->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_http) g_http->stop();
  });
  std::cerr << "listening on " << host << ":" << bound << "\n";
  http.listen();
  g_http = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  at::set_num_threads(1);
  CLI::App app{"Light-field foreground de-occlusion"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Embed occluders into clean light fields");
  s->add_option("--mode", synth.mode, "train, single or double")->check(CLI::IsMember({"train", "single", "double"}));
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--clean,--clean-dir", synth.clean, "Directory of clean light fields (view_dir layout); procedural if omitted")
      ->check(CLI::ExistingDirectory);
  s->add_option("--templates", synth.templates, "Directory of RGBA occluder templates; procedural if omitted")
      ->check(CLI::ExistingDirectory);
  s->add_option("--count", synth.count, "Samples (train) or procedural scenes")->check(CLI::PositiveNumber);
  s->add_option("--width", synth.width)->check(CLI::PositiveNumber);
  s->add_option("--height", synth.height)->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed);

  fs::path config, resume;
  auto* t = app.add_subcommand("train", "Train from a configuration file");
  t->add_option("--config", config)->required()->check(CLI::ExistingFile);
  t->add_option("--resume", resume, "Checkpoint to continue from")->check(CLI::ExistingFile);

  fs::path ckpt, data, out;
  std::string baseline, title;
  auto* e = app.add_subcommand("eval", "PSNR/SSIM over a test set");
  auto* ck = e->add_option("--ckpt", ckpt)->check(CLI::ExistingFile);
  auto* bl = e->add_option("--baseline", baseline, "Evaluate a reference predictor instead of a model")
                 ->check(CLI::IsMember({"identity", "oracle"}));
  ck->excludes(bl);
  e->add_option("--data", data)->required()->check(CLI::ExistingDirectory);
  e->add_option("--out", out, "JSON report");
  e->add_option("--title", title);

  std::string host = "127.0.0.1";
  int port = 8080, ttl = 30;
  auto* v = app.add_subcommand("serve", "REST service for interactive mask editing");
  v->add_option("--ckpt", ckpt)->required()->check(CLI::ExistingFile);
  v->add_option("--host", host);
  v->add_option("--port", port)->check(CLI::Range(0, 65535));
  v->add_option("--ttl", ttl, "Idle session lifetime in minutes")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s) return run_synth(synth);
    if (*t) return run_train(config, resume);
    if (*e) {
      if (ckpt.empty() && baseline.empty()) throw ArgumentError("eval needs --ckpt or --baseline");
      return run_eval(ckpt, baseline, data, out, title);
    }
    if (*v) return run_serve(ckpt, host, port, ttl);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
