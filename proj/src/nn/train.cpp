#include "isty/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "isty/error.hpp"
#include "json.hpp"

namespace isty::nn {
using nlohmann::json;

FbsConfig TrainConfig::fbs() const {
  FbsConfig f;
  f.candidates.clear();
  const int n = static_cast<int>(std::floor((fbs_dmax - fbs_dmin) / fbs_dstep + 1e-9));
  for (int i = 0; i <= n; ++i) f.candidates.push_back(fbs_dmin + i * fbs_dstep);
  f.window = fbs_window;
  f.d0 = fbs_d0;
  f.s_norm = fbs_s_norm;
  return f;
}

void TrainConfig::validate() const {
  model.validate();
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (decay_every < 1) throw ConfigError("decay_every must be >= 1");
  if (!(decay_factor > 0.0)) throw ConfigError("decay_factor must be > 0");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
  if (loss.lambda1 < 0 || loss.lambda2 < 0) throw ConfigError("loss weights must be >= 0");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) throw ConfigError("betas must be in [0,1)");
  if (augment) model.check_input(crop_width, crop_height);
  if (!(fbs_dstep > 0.0) || fbs_dmax <= fbs_dmin) throw ConfigError("bad FBS candidate range");
  if (!(fbs_s_norm > 0.0)) throw ConfigError("fbs_s_norm must be > 0");
}

std::string TrainConfig::to_json() const {
  json j = json::parse(model.to_json());
  j.update({{"lambda1", loss.lambda1},
            {"lambda2", loss.lambda2},
            {"lr", lr},
            {"beta1", beta1},
            {"beta2", beta2},
            {"batch", batch},
            {"epochs", epochs},
            {"decay_every", decay_every},
            {"decay_factor", decay_factor},
            {"clip_norm", clip_norm},
            {"seed", seed},
            {"augment", augment},
            {"crop_width", crop_width},
            {"crop_height", crop_height},
            {"max_steps", max_steps},
            {"checkpoint_every", checkpoint_every},
            {"deterministic", deterministic},
            {"data_dir", data_dir},
            {"out_dir", out_dir},
            {"feature_weights", feature_weights},
            {"feature_seed", feature_seed},
            {"fbs_window", fbs_window},
            {"fbs_d0", fbs_d0},
            {"fbs_s_norm", fbs_s_norm},
            {"fbs_dmin", fbs_dmin},
            {"fbs_dmax", fbs_dmax},
            {"fbs_dstep", fbs_dstep}});
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainConfig c;
  json model = json::object();
  try {
    for (auto& [k, v] : j.items()) {
      if (k == "lambda1") c.loss.lambda1 = v.get<double>();
      else if (k == "lambda2") c.loss.lambda2 = v.get<double>();
      else if (k == "lr") c.lr = v.get<double>();
      else if (k == "beta1") c.beta1 = v.get<double>();
      else if (k == "beta2") c.beta2 = v.get<double>();
      else if (k == "batch") c.batch = v.get<int>();
      else if (k == "epochs") c.epochs = v.get<int>();
      else if (k == "decay_every") c.decay_every = v.get<int>();
      else if (k == "decay_factor") c.decay_factor = v.get<double>();
      else if (k == "clip_norm") c.clip_norm = v.get<double>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "augment") c.augment = v.get<bool>();
      else if (k == "crop_width") c.crop_width = v.get<int>();
      else if (k == "crop_height") c.crop_height = v.get<int>();
      else if (k == "max_steps") c.max_steps = v.get<int64_t>();
      else if (k == "checkpoint_every") c.checkpoint_every = v.get<int>();
      else if (k == "deterministic") c.deterministic = v.get<bool>();
      else if (k == "data_dir") c.data_dir = v.get<std::string>();
      else if (k == "out_dir") c.out_dir = v.get<std::string>();
      else if (k == "feature_weights") c.feature_weights = v.get<std::string>();
      else if (k == "feature_seed") c.feature_seed = v.get<std::uint64_t>();
      else if (k == "fbs_window") c.fbs_window = v.get<int>();
      else if (k == "fbs_d0") c.fbs_d0 = v.get<double>();
      else if (k == "fbs_s_norm") c.fbs_s_norm = v.get<double>();
      else if (k == "fbs_dmin") c.fbs_dmin = v.get<double>();
      else if (k == "fbs_dmax") c.fbs_dmax = v.get<double>();
      else if (k == "fbs_dstep") c.fbs_dstep = v.get<double>();
      else model[k] = v;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  c.model = ModelConfig::from_json(model.dump());
  c.validate();
  return c;
}

TrainConfig TrainConfig::from_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

void require_finite(const torch::Tensor& t, const std::string& name) {
  if (!torch::isfinite(t).all().item<bool>())
    throw NonFiniteError(name, "non-finite values in " + name);
}

}  // namespace

Trainer::Trainer(TrainConfig cfg, std::vector<TrainSample> data, FeatureFn features)
    : cfg_(std::move(cfg)), data_(std::move(data)), features_(std::move(features)),
      data_rng_(mix_seed(cfg_.seed, 1)) {
  cfg_.validate();
  if (data_.empty()) throw ConfigError("training data is empty");
  for (const auto& s : data_)
    if (s.lf_occ.U() != cfg_.model.U || s.lf_occ.V() != cfg_.model.V)
      throw ConfigError("sample " + s.name + " does not match the configured angular size");
  if (cfg_.deterministic) at::globalContext().setDeterministicAlgorithms(true, false);
  fbs_cache_.resize(data_.size());
  if (!features_) {
    vgg_ = Vgg16Features(cfg_.feature_seed);
    if (!cfg_.feature_weights.empty()) vgg_->load_weights(cfg_.feature_weights);
    vgg_->eval();
    features_ = [vgg = vgg_](const torch::Tensor& x) mutable { return vgg->forward(x); };
  }
  torch::manual_seed(cfg_.seed);
  net_ = IstyNet(cfg_.model);
  opt_ = std::make_unique<torch::optim::Adam>(
      net_->parameters(),
      torch::optim::AdamOptions(cfg_.lr).betas({cfg_.beta1, cfg_.beta2}));
}

double Trainer::lr_for_epoch(int epoch) const {
  return cfg_.lr * std::pow(cfg_.decay_factor, epoch / cfg_.decay_every);
}

void Trainer::set_lr(double lr) {
  for (auto& g : opt_->param_groups()) static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
}

StepMetrics Trainer::train_step(const Batch& b) {
  net_->train();
  opt_->zero_grad();
  const NetOutput r = net_->forward(b.sai, b.fbs);
  for (std::size_t k = 0; k < r.pyramid.size(); ++k) require_finite(r.pyramid[k], "f^" + std::to_string(k));
  require_finite(r.mask, "mask");
  require_finite(r.pred, "prediction");
  require_finite(r.out, "output");
  const ImageLoss li = loss_image(r.out, b.i_gt, cfg_.loss, features_);
  const auto lm = loss_mask(r.mask, b.m_gt);
  require_finite(li.l1, "loss.l1");
  require_finite(li.perceptual, "loss.perceptual");
  require_finite(li.style, "loss.style");
  require_finite(lm, "loss.mask");
  const auto total = li.total + lm;
  total.backward();
  for (const auto& p : net_->named_parameters())
    if (p.value().grad().defined()) require_finite(p.value().grad(), "grad:" + p.key());
  torch::nn::utils::clip_grad_norm_(net_->parameters(), cfg_.clip_norm);
  opt_->step();
  ++step_;

  StepMetrics m;
  m.step = step_;
  m.epoch = epoch_;
  m.lr = static_cast<torch::optim::AdamOptions&>(opt_->param_groups()[0].options()).lr();
  m.l1 = li.l1.item<double>();
  m.perceptual = li.perceptual.item<double>();
  m.style = li.style.item<double>();
  m.loss_image = li.total.item<double>();
  m.loss_mask = lm.item<double>();
  m.total = total.item<double>();
  if (log_.is_open()) {
    log_ << std::setprecision(9) << m.step << ',' << m.epoch << ',' << m.lr << ',' << m.l1 << ','
         << m.perceptual << ',' << m.style << ',' << m.loss_image << ',' << m.loss_mask << ','
         << m.total << '\n';
    log_.flush();
  }
  return m;
}

const FbsScoreMap& Trainer::cached_fbs(std::size_t i) {
  if (!fbs_cache_[i]) fbs_cache_[i] = compute_fbs(data_[i].lf_occ, cfg_.fbs());
  return *fbs_cache_[i];
}

Batch Trainer::plain_batch(const std::vector<std::size_t>& indices) {
  std::vector<const TrainSample*> s;
  std::vector<const FbsScoreMap*> f;
  for (auto i : indices) {
    s.push_back(&data_.at(i));
    f.push_back(&cached_fbs(i));
  }
  return make_batch(s, f);
}

bool Trainer::done() const {
  return epoch_ >= cfg_.epochs || (cfg_.max_steps > 0 && step_ >= cfg_.max_steps);
}

std::vector<StepMetrics> Trainer::run_epoch() {
  set_lr(lr_for_epoch(epoch_));
  std::vector<std::size_t> order(data_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(data_rng_.uniform_int(0, i - 1))]);

  std::vector<StepMetrics> out;
  for (std::size_t start = 0; start < order.size(); start += cfg_.batch) {
    if (cfg_.max_steps > 0 && step_ >= cfg_.max_steps) break;
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg_.batch));
    std::vector<std::size_t> idx(order.begin() + start, order.begin() + end);
    if (!cfg_.augment) {
      out.push_back(train_step(plain_batch(idx)));
      continue;
    }
    std::vector<TrainSample> aug;
    std::vector<FbsScoreMap> fbs;
    for (auto i : idx) {
      aug.push_back(augment(data_[i], data_rng_.next(), {cfg_.crop_width, cfg_.crop_height}));
      fbs.push_back(compute_fbs(aug.back().lf_occ, cfg_.fbs()));
    }
    std::vector<const TrainSample*> sp;
    std::vector<const FbsScoreMap*> fp;
    for (std::size_t k = 0; k < aug.size(); ++k) {
      sp.push_back(&aug[k]);
      fp.push_back(&fbs[k]);
    }
    out.push_back(train_step(make_batch(sp, fp)));
  }
  ++epoch_;
  return out;
}

void Trainer::train(const std::function<void(const StepMetrics&)>& on_step) {
  while (!done()) {
    for (const auto& m : run_epoch())
      if (on_step) on_step(m);
    if (!cfg_.out_dir.empty() && cfg_.checkpoint_every > 0 && epoch_ % cfg_.checkpoint_every == 0) {
      std::filesystem::create_directories(cfg_.out_dir);
      save_checkpoint(std::filesystem::path(cfg_.out_dir) / ("epoch_" + std::to_string(epoch_) + ".pt"));
    }
  }
  if (!cfg_.out_dir.empty()) {
    std::filesystem::create_directories(cfg_.out_dir);
    save_checkpoint(std::filesystem::path(cfg_.out_dir) / "last.pt");
  }
}

void Trainer::set_metrics_log(const std::filesystem::path& file) {
  const bool fresh = !std::filesystem::exists(file) || std::filesystem::file_size(file) == 0;
  log_.open(file, std::ios::app);
  if (!log_) throw LoadError("cannot open metrics log " + file.string());
  if (fresh) log_ << "step,epoch,lr,l1,perceptual,style,loss_image,loss_mask,total\n";
}

void Trainer::save_checkpoint(const std::filesystem::path& file) const {
  torch::serialize::OutputArchive ar;
  ar.write("format_version", c10::IValue(kCheckpointVersion));
  ar.write("config", c10::IValue(cfg_.to_json()));
  ar.write("epoch", c10::IValue(static_cast<int64_t>(epoch_)));
  ar.write("step", c10::IValue(step_));
  ar.write("data_rng", c10::IValue(data_rng_.state()));
  {
    at::Generator gen = at::detail::getDefaultCPUGenerator();
    std::lock_guard<std::mutex> lock(gen.mutex());
    ar.write("torch_rng", gen.get_state());
  }
  torch::serialize::OutputArchive model, optim;
  net_->save(model);
  opt_->save(optim);
  ar.write("model", model);
  ar.write("optimizer", optim);
  ar.save_to(file.string());
}

namespace {

torch::serialize::InputArchive open_checkpoint(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw LoadError("no checkpoint at " + file.string());
  torch::serialize::InputArchive ar;
  try {
    ar.load_from(file.string());
  } catch (const c10::Error& e) {
    throw FormatError("unreadable checkpoint " + file.string() + ": " + e.what_without_backtrace());
  }
  c10::IValue v;
  if (!ar.try_read("format_version", v) || !v.isInt())
    throw FormatError("checkpoint " + file.string() + " has no format version");
  if (v.toInt() != kCheckpointVersion)
    throw FormatError("checkpoint format version " + std::to_string(v.toInt()) + ", expected " +
                      std::to_string(kCheckpointVersion));
  return ar;
}

std::string read_string(torch::serialize::InputArchive& ar, const char* key) {
  c10::IValue v;
  if (!ar.try_read(key, v) || !v.isString()) throw FormatError(std::string("checkpoint lacks ") + key);
  return v.toStringRef();
}

int64_t read_int(torch::serialize::InputArchive& ar, const char* key) {
  c10::IValue v;
  if (!ar.try_read(key, v) || !v.isInt()) throw FormatError(std::string("checkpoint lacks ") + key);
  return v.toInt();
}

}  // namespace

void Trainer::load_checkpoint(const std::filesystem::path& file) {
  auto ar = open_checkpoint(file);
  const TrainConfig saved = TrainConfig::from_json(read_string(ar, "config"));
  if (!(saved.model == cfg_.model))
    throw ConfigError("checkpoint model configuration differs from the trainer's");
  epoch_ = static_cast<int>(read_int(ar, "epoch"));
  step_ = read_int(ar, "step");
  data_rng_.set_state(read_string(ar, "data_rng"));
  torch::Tensor gen_state;
  ar.read("torch_rng", gen_state);
  at::Generator gen = at::detail::getDefaultCPUGenerator();
  {
    std::lock_guard<std::mutex> lock(gen.mutex());
    gen.set_state(gen_state);
  }
  torch::serialize::InputArchive model, optim;
  ar.read("model", model);
  ar.read("optimizer", optim);
  net_->load(model);
  opt_->load(optim);
}

LoadedModel load_model(const std::filesystem::path& file) {
  auto ar = open_checkpoint(file);
  LoadedModel m;
  m.config = TrainConfig::from_json(read_string(ar, "config"));
  m.epoch = static_cast<int>(read_int(ar, "epoch"));
  m.net = IstyNet(m.config.model);
  torch::serialize::InputArchive model;
  ar.read("model", model);
  m.net->load(model);
  m.net->eval();
  return m;
}

DeoccPipeline load_pipeline(const std::filesystem::path& file) {
  LoadedModel m = load_model(file);
  return DeoccPipeline(m.net, m.config.fbs());
}

std::vector<TrainSample> load_sample_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("no sample directory " + dir.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory() && std::filesystem::exists(e.path() / "i_gt.png")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<TrainSample> out;
  for (const auto& d : dirs) out.push_back(load_train_sample(d));
  return out;
}

}  // namespace isty::nn
