#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isty/occlusion_synth.hpp"

namespace isty {

/// Produces the de-occluded center view for one test scene.
using Predictor = std::function<ViewImage(const TrainSample&)>;

Predictor identity_predictor();  // the occluded center view
Predictor oracle_predictor();    // the ground truth

struct SceneMetrics {
  std::string name;
  double psnr = 0, ssim = 0;
  std::optional<double> psnr_occluded;  // empty when m_gt has no pixel below 0.5
};

struct EvalReport {
  std::vector<SceneMetrics> rows;
  double mean_psnr = 0, mean_ssim = 0;
  std::optional<double> mean_psnr_occluded;

  std::string to_json() const;
  /// Fixed-width table with "xx.xx/0.xxx" PSNR/SSIM cells.
  std::string to_table(const std::string& title = "") const;
};

EvalReport evaluate_set(const std::vector<TrainSample>& samples, const Predictor& predict);

/// "32.44/0.947"
std::string format_cell(double psnr, double ssim);

}  // namespace isty
