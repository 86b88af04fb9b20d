#include "isty/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include "isty/error.hpp"
#include "isty/metrics.hpp"
#include "json.hpp"

namespace isty {

Predictor identity_predictor() {
  return [](const TrainSample& s) { return center_view(s.lf_occ); };
}

Predictor oracle_predictor() {
  return [](const TrainSample& s) { return s.i_gt; };
}

EvalReport evaluate_set(const std::vector<TrainSample>& samples, const Predictor& predict) {
  if (samples.empty()) throw ArgumentError("evaluate_set: empty dataset");
  EvalReport r;
  double occ_sum = 0.0;
  int occ_n = 0;
  for (const auto& s : samples) {
    const ViewImage out = predict(s);
    SceneMetrics m;
    m.name = s.name;
    m.psnr = psnr(out, s.i_gt);
    m.ssim = ssim(out, s.i_gt);
    try {
      m.psnr_occluded = psnr(out, s.i_gt, s.m_gt);
      occ_sum += *m.psnr_occluded;
      ++occ_n;
    } catch (const UndefinedRegionError&) {
    }
    r.mean_psnr += m.psnr;
    r.mean_ssim += m.ssim;
    r.rows.push_back(std::move(m));
  }
  r.mean_psnr /= samples.size();
  r.mean_ssim /= samples.size();
  if (occ_n > 0) r.mean_psnr_occluded = occ_sum / occ_n;
  return r;
}

std::string format_cell(double psnr, double ssim) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f/%.3f", psnr, ssim);
  return buf;
}

std::string EvalReport::to_json() const {
  using nlohmann::json;
  json rows_j = json::array();
  for (const auto& m : rows) {
    json row = {{"name", m.name}, {"psnr", m.psnr}, {"ssim", m.ssim}};
    row["psnr_occluded"] = m.psnr_occluded ? json(*m.psnr_occluded) : json(nullptr);
    rows_j.push_back(row);
  }
  json j = {{"scenes", rows_j},
            {"mean", {{"psnr", mean_psnr},
                      {"ssim", mean_ssim},
                      {"psnr_occluded", mean_psnr_occluded ? json(*mean_psnr_occluded) : json(nullptr)}}}};
  return j.dump(2);
}

std::string EvalReport::to_table(const std::string& title) const {
  std::ostringstream os;
  char line[160];
  if (!title.empty()) os << title << '\n';
  std::snprintf(line, sizeof line, "%-28s %-13s %s\n", "scene", "PSNR/SSIM", "occ. PSNR");
  os << line;
  auto occ = [](const std::optional<double>& v) {
    char b[16];
    if (!v) return std::string("-");
    std::snprintf(b, sizeof b, "%.2f", *v);
    return std::string(b);
  };
  for (const auto& m : rows) {
    std::snprintf(line, sizeof line, "%-28s %-13s %s\n", m.name.c_str(),
                  format_cell(m.psnr, m.ssim).c_str(), occ(m.psnr_occluded).c_str());
    os << line;
  }
  std::snprintf(line, sizeof line, "%-28s %-13s %s\n", "mean", format_cell(mean_psnr, mean_ssim).c_str(),
                occ(mean_psnr_occluded).c_str());
  os << line;
  return os.str();
}

}  // namespace isty
