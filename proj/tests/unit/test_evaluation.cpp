#include "doctest.h"
#include "isty/error.hpp"
#include "isty/evaluation.hpp"
#include "isty/metrics.hpp"
#include "isty/synthetic.hpp"
#include "json.hpp"

using namespace isty;

namespace {

std::vector<TrainSample> small_set() {
  std::vector<LightField> clean;
  for (int i = 0; i < 3; ++i) clean.push_back(make_clean_scene(40 + i, 5, 5, 48, 32));
  const TemplatePool pool = make_procedural_templates(9, 4, 8, 16);
  return make_test_set(clean, TestMode::single, 5, pool);
}

}  // namespace

TEST_CASE("evaluate_set") {
  const auto set = small_set();
  SUBCASE("oracle") {
    const EvalReport r = evaluate_set(set, oracle_predictor());
    CHECK(r.rows.size() == 3);
    CHECK(r.mean_psnr == 100.0);
    CHECK(r.mean_ssim == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.mean_psnr_occluded);
    CHECK(*r.mean_psnr_occluded == 100.0);
  }
  SUBCASE("identity baseline equals the occluded-input degradation") {
    const EvalReport r = evaluate_set(set, identity_predictor());
    double sum = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double expect = psnr(center_view(set[i].lf_occ), set[i].i_gt, set[i].m_gt);
      REQUIRE(r.rows[i].psnr_occluded);
      CHECK(*r.rows[i].psnr_occluded == expect);
      CHECK(r.rows[i].name == set[i].name);
      sum += expect;
    }
    CHECK(*r.mean_psnr_occluded == doctest::Approx(sum / 3).epsilon(1e-12));
    CHECK(r.mean_psnr < 100.0);
  }
  SUBCASE("scenes without occluded pixels have no occluded-region score") {
    auto s = set;
    for (auto& sample : s) {
      sample.m_gt = SoftMask(48, 32, 1.0f);
      sample.lf_occ = make_clean_scene(1, 5, 5, 48, 32);
    }
    const EvalReport r = evaluate_set(s, identity_predictor());
    CHECK(!r.rows[0].psnr_occluded);
    CHECK(!r.mean_psnr_occluded);
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["mean"]["psnr_occluded"].is_null());
  }
  SUBCASE("empty set") { CHECK_THROWS_AS(evaluate_set({}, oracle_predictor()), ArgumentError); }
}

TEST_CASE("report formatting") {
  CHECK(format_cell(32.444, 0.9474) == "32.44/0.947");
  CHECK(format_cell(28.31, 0.902) == "28.31/0.902");
  CHECK(format_cell(100.0, 1.0) == "100.00/1.000");

  const EvalReport r = evaluate_set(small_set(), oracle_predictor());
  const std::string table = r.to_table("Single Occ");
  CHECK(table.rfind("Single Occ\n", 0) == 0);
  CHECK(table.find("100.00/1.000") != std::string::npos);
  CHECK(table.find("mean") != std::string::npos);

  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["scenes"].size() == 3);
  CHECK(j["mean"]["psnr"].get<double>() == 100.0);
  CHECK(j["scenes"][0]["name"] == r.rows[0].name);
}
