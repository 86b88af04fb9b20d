#include "isty/nn/config.hpp"

#include "isty/error.hpp"
#include "json.hpp"

namespace isty::nn {
using nlohmann::json;

FusionKind parse_fusion(const std::string& s) {
  if (s == "conv1x1") return FusionKind::conv1x1;
  if (s == "sa_fusion") return FusionKind::sa_fusion;
  if (s == "mf_fusion") return FusionKind::mf_fusion;
  throw ConfigError("unknown fusion kind '" + s + "'");
}

std::string to_string(FusionKind k) {
  switch (k) {
    case FusionKind::conv1x1: return "conv1x1";
    case FusionKind::sa_fusion: return "sa_fusion";
    case FusionKind::mf_fusion: return "mf_fusion";
  }
  return "?";
}

MaskActivation parse_activation(const std::string& s) {
  if (s == "gaussian") return MaskActivation::gaussian;
  if (s == "logistic") return MaskActivation::logistic;
  throw ConfigError("unknown mask activation '" + s + "'");
}

std::string to_string(MaskActivation a) {
  return a == MaskActivation::gaussian ? "gaussian" : "logistic";
}

void ModelConfig::validate() const {
  if (U < 1 || V < 1 || U % 2 == 0 || V % 2 == 0)
    throw ConfigError("angular size must be odd and positive");
  if (K < 2) throw ConfigError("K must be at least 2 (the mask generator reads f^0..f^2)");
  if (static_cast<int>(lfe_widths.size()) != K + 1)
    throw ConfigError("lfe_widths needs K+1 entries");
  if (static_cast<int>(oi_widths.size()) != K) throw ConfigError("oi_widths needs K entries");
  if (omg_widths.size() != 3) throw ConfigError("omg_widths needs 3 entries");
  auto positive = [](const std::vector<int>& w) {
    for (int c : w)
      if (c < 1) return false;
    return true;
  };
  if (!positive(lfe_widths) || !positive(oi_widths) || !positive(omg_widths))
    throw ConfigError("channel widths must be positive");
  if (attention_from < 1) throw ConfigError("attention_from must be >= 1");
  if (!(leaky_slope >= 0.0)) throw ConfigError("leaky_slope must be >= 0");
}

void ModelConfig::check_input(int width, int height) const {
  if (width <= 0 || height <= 0 || width % stride() != 0 || height % stride() != 0)
    throw ConfigError("input " + std::to_string(width) + "x" + std::to_string(height) +
                      " is not divisible by 2^K = " + std::to_string(stride()));
}

std::string ModelConfig::to_json() const {
  json j = {{"U", U},
            {"V", V},
            {"K", K},
            {"lfe_widths", lfe_widths},
            {"omg_widths", omg_widths},
            {"oi_widths", oi_widths},
            {"attention_from", attention_from},
            {"leaky_slope", leaky_slope},
            {"gamma_init", gamma_init},
            {"fusion", to_string(fusion)},
            {"activation", to_string(activation)}};
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  ModelConfig c;
  try {
    for (auto& [key, value] : j.items()) {
      if (key == "U") c.U = value.get<int>();
      else if (key == "V") c.V = value.get<int>();
      else if (key == "K") c.K = value.get<int>();
      else if (key == "lfe_widths") c.lfe_widths = value.get<std::vector<int>>();
      else if (key == "omg_widths") c.omg_widths = value.get<std::vector<int>>();
      else if (key == "oi_widths") c.oi_widths = value.get<std::vector<int>>();
      else if (key == "attention_from") c.attention_from = value.get<int>();
      else if (key == "leaky_slope") c.leaky_slope = value.get<double>();
      else if (key == "gamma_init") c.gamma_init = value.get<double>();
      else if (key == "fusion") c.fusion = parse_fusion(value.get<std::string>());
      else if (key == "activation") c.activation = parse_activation(value.get<std::string>());
      else throw ConfigError("unknown model config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

ModelConfig tiny_config(int U, int V) {
  ModelConfig c;
  c.U = U;
  c.V = V;
  c.K = 3;
  c.lfe_widths = {8, 8, 8, 8};
  c.omg_widths = {8, 8, 8};
  c.oi_widths = {8, 8, 8};
  return c;
}

}  // namespace isty::nn
