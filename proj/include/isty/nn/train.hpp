#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "isty/fbs.hpp"
#include "isty/nn/loss.hpp"
#include "isty/nn/models.hpp"
#include "isty/nn/pipeline.hpp"
#include "isty/nn/tensor_io.hpp"
#include "isty/occlusion_synth.hpp"
#include "isty/rng.hpp"

namespace isty::nn {

inline constexpr int64_t kCheckpointVersion = 1;

/// Every tunable in one flat JSON object; the model keys are those of
/// ModelConfig.
struct TrainConfig {
  ModelConfig model;
  LossWeights loss;
  double lr = 5e-4;
  double beta1 = 0.5, beta2 = 0.9;
  int batch = 16;
  int epochs = 500;
  int decay_every = 200;
  double decay_factor = 0.5;
  double clip_norm = 10.0;
  std::uint64_t seed = 0;
  bool augment = true;
  int crop_width = 256, crop_height = 192;
  int64_t max_steps = 0;  // 0 = no limit
  int checkpoint_every = 10;  // epochs; 0 = only at the end
  bool deterministic = true;
  std::string data_dir, out_dir;
  std::string feature_weights;  // empty = seeded random feature net
  std::uint64_t feature_seed = 0;
  int fbs_window = 3;
  double fbs_d0 = 0.0, fbs_s_norm = 2.0;
  double fbs_dmin = -4.0, fbs_dmax = 9.0, fbs_dstep = 0.5;

  FbsConfig fbs() const;
  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  static TrainConfig from_file(const std::filesystem::path& file);
};

struct StepMetrics {
  int64_t step = 0;
  int epoch = 0;
  double lr = 0;
  double l1 = 0, perceptual = 0, style = 0, loss_image = 0, loss_mask = 0, total = 0;
};

/// Adam on LFE + OMG + OI with the halving schedule, gradient clipping and
/// checkpoint/resume.  Owns the parameters exclusively while training.
class Trainer {
 public:
  /// `features` defaults to the VGG-16 pyramid configured in `cfg`.
  Trainer(TrainConfig cfg, std::vector<TrainSample> data, FeatureFn features = {});

  StepMetrics train_step(const Batch& batch);
  /// Trains until cfg.epochs (or cfg.max_steps) is reached.
  void train(const std::function<void(const StepMetrics&)>& on_step = {});
  /// One pass over the data in a seeded order; returns the step metrics.
  std::vector<StepMetrics> run_epoch();

  double lr_for_epoch(int epoch) const;
  void set_lr(double lr);

  void save_checkpoint(const std::filesystem::path& file) const;
  void load_checkpoint(const std::filesystem::path& file);

  /// Appends one CSV row per step; writes the header when the file is new.
  void set_metrics_log(const std::filesystem::path& file);

  IstyNet& net() { return net_; }
  torch::optim::Adam& optimizer() { return *opt_; }
  const TrainConfig& config() const { return cfg_; }
  int epoch() const { return epoch_; }
  int64_t step() const { return step_; }
  const Rng& data_rng() const { return data_rng_; }
  /// Network inputs for sample i without augmentation.
  Batch plain_batch(const std::vector<std::size_t>& indices);

 private:
  const FbsScoreMap& cached_fbs(std::size_t i);
  bool done() const;

  TrainConfig cfg_;
  std::vector<TrainSample> data_;
  std::vector<std::optional<FbsScoreMap>> fbs_cache_;
  FeatureFn features_;
  Vgg16Features vgg_{nullptr};
  IstyNet net_{nullptr};
  std::unique_ptr<torch::optim::Adam> opt_;
  Rng data_rng_;
  int epoch_ = 0;
  int64_t step_ = 0;
  std::ofstream log_;
};

struct LoadedModel {
  IstyNet net{nullptr};
  TrainConfig config;
  int epoch = 0;
};

/// Network and configuration from a checkpoint, in inference mode.
LoadedModel load_model(const std::filesystem::path& file);
DeoccPipeline load_pipeline(const std::filesystem::path& file);

/// All sample directories below `dir` (sorted), as written by save_train_sample.
std::vector<TrainSample> load_sample_dir(const std::filesystem::path& dir);

}  // namespace isty::nn
