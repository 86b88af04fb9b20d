#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "isty/error.hpp"
#include "isty/mask_ops.hpp"
#include "isty/rng.hpp"
#include "scenes.hpp"

using namespace isty;

TEST_CASE("band_mask truth table") {
  // (m_d1, m_d2) -> expected
  const float table[4][3] = {{0, 0, 1}, {0, 1, 0}, {1, 1, 1}, {1, 0, 1}};
  for (const auto& row : table) {
    SoftMask a(1, 1, row[0]), b(1, 1, row[1]);
    CHECK(band_mask(a, b).at(0, 0) == row[2]);
  }
}

TEST_CASE("band_mask properties") {
  Rng rng(3);
  SoftMask a(16, 16), b(16, 16);
  for (float& v : a.data()) v = static_cast<float>(rng.uniform());
  for (float& v : b.data()) v = static_cast<float>(rng.uniform());
  SUBCASE("degenerate band keeps everything") {
    const SoftMask out = band_mask(a, a);
    for (float v : out.data()) CHECK(v == 1.0f);
  }
  SUBCASE("bounded") {
    const SoftMask out = band_mask(a, b);
    for (float v : out.data()) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
  SUBCASE("adjacent bands union to the wide band") {
    // every binary triple with M^{d1} <= M^{d2} <= M^{d3}
    for (int m1 = 0; m1 <= 1; ++m1)
      for (int m2 = m1; m2 <= 1; ++m2)
        for (int m3 = m2; m3 <= 1; ++m3) {
          SoftMask s1(1, 1, float(m1)), s2(1, 1, float(m2)), s3(1, 1, float(m3));
          const float joined = std::min(band_mask(s1, s2).at(0, 0), band_mask(s2, s3).at(0, 0));
          CHECK(joined == band_mask(s1, s3).at(0, 0));
        }
  }
  SUBCASE("shape mismatch") { CHECK_THROWS_AS(band_mask(a, SoftMask(16, 15)), ArgumentError); }
}

TEST_CASE("merge_user_edit") {
  SoftMask m(20, 16, 0.5f);
  SUBCASE("disc sets pixel centers within the radius") {
    auto out = merge_user_edit(m, {{Disc{10, 8, 3}, 1}});
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 20; ++x) {
        const bool in = (x - 10) * (x - 10) + (y - 8) * (y - 8) <= 9;
        REQUIRE(out.at(x, y) == (in ? 1.0f : 0.5f));
      }
  }
  SUBCASE("empty stroke list is the identity") { CHECK(merge_user_edit(m, {}) == m); }
  SUBCASE("full-frame keep") {
    auto out = merge_user_edit(m, {{Polygon{{{0, 0}, {19, 0}, {19, 15}, {0, 15}}}, 1}});
    for (float v : out.data()) CHECK(v == 1.0f);
  }
  SUBCASE("later strokes win") {
    auto out = merge_user_edit(m, {{Disc{10, 8, 3}, 1}, {Disc{10, 8, 1}, 0}});
    CHECK(out.at(10, 8) == 0.0f);
    CHECK(out.at(12, 8) == 1.0f);
    auto rev = merge_user_edit(m, {{Disc{10, 8, 1}, 0}, {Disc{10, 8, 3}, 1}});
    CHECK(rev.at(10, 8) == 1.0f);
  }
  SUBCASE("idempotent") {
    const std::vector<Stroke> s = {{Disc{4, 4, 2}, 0}, {Polygon{{{8, 2}, {16, 2}, {16, 10}}}, 1}};
    auto once = merge_user_edit(m, s);
    CHECK(merge_user_edit(once, s) == once);
  }
  SUBCASE("polygon") {
    auto out = merge_user_edit(m, {{Polygon{{{2, 2}, {8, 2}, {8, 6}, {2, 6}}}, 0}});
    CHECK(out.at(5, 4) == 0.0f);
    CHECK(out.at(10, 4) == 0.5f);
    CHECK(out.at(1, 1) == 0.5f);
  }
  SUBCASE("disc at the border is clipped") {
    auto out = merge_user_edit(m, {{Disc{0, 0, 2}, 0}});
    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(2, 0) == 0.0f);
    CHECK(out.at(3, 0) == 0.5f);
  }
  SUBCASE("out-of-frame strokes") {
    CHECK_THROWS_AS(merge_user_edit(m, {{Disc{25, 4, 2}, 1}}), ArgumentError);
    CHECK_THROWS_AS(merge_user_edit(m, {{Polygon{{{2, 2}, {30, 2}, {8, 6}}}, 1}}), ArgumentError);
    CHECK_THROWS_AS(merge_user_edit(m, {{Disc{5, 5, 2}, 3}}), ArgumentError);
  }
}

TEST_CASE("stroke json") {
  const std::vector<Stroke> s = {{Disc{3.5, 4, 2}, 0}, {Polygon{{{1, 1}, {5, 1}, {3, 4}}}, 1}};
  const auto back = strokes_from_json(strokes_to_json(s));
  REQUIRE(back.size() == 2);
  const auto& d = std::get<Disc>(back[0].region);
  CHECK(d.cx == 3.5);
  CHECK(d.radius == 2);
  CHECK(back[0].value == 0);
  CHECK(std::get<Polygon>(back[1].region).points.size() == 3);
  CHECK_THROWS_AS(strokes_from_json("{\"strokes\":[{\"type\":\"blob\"}]}"), FormatError);
  CHECK_THROWS_AS(strokes_from_json("not json"), FormatError);
}

TEST_CASE("mask_at_disparity with the FBS mask model") {
  using isty::testing::Layer;
  const int X = 64, Y = 48;
  const Layer near{6, 10, 16, 16, 2}, far{36, 14, 18, 18, 5};
  const LightField lf = isty::testing::render_layers(X, Y, 0, {far, near}, 77);
  const FbsMaskModel model{FbsConfig{}};

  SUBCASE("d = 0 is the plain model") {
    CHECK(mask_at_disparity(lf, 0.0, model) == model.generate(lf));
  }
  SUBCASE("only the occluder in front of the plane is masked") {
    const SoftMask m = mask_at_disparity(lf, 3.0, model);
    auto fraction_below = [&](const Layer& r, bool inside) {
      int n = 0, hit = 0;
      for (int y = 4; y < Y - 4; ++y)
        for (int x = 4; x < X - 4; ++x) {
          const bool in = x >= r.x0 + 2 && x < r.x0 + r.w - 2 && y >= r.y0 + 2 && y < r.y0 + r.h - 2;
          if (in != inside) continue;
          ++n;
          hit += m.at(x, y) < 0.5f;
        }
      return double(hit) / n;
    };
    CHECK(fraction_below(far, true) >= 0.9);
    CHECK(fraction_below(near, true) <= 0.1);
    for (float v : m.data()) REQUIRE((v >= 0.0f && v <= 1.0f));
    // Background away from both occluders stays unmasked.
    int n = 0, kept = 0;
    for (int y = 4; y < Y - 4; ++y)
      for (int x = 4; x < X - 4; ++x) {
        auto near_rect = [&](const Layer& r, int pad) {
          return x >= r.x0 - pad && x < r.x0 + r.w + pad && y >= r.y0 - pad && y < r.y0 + r.h + pad;
        };
        // Margins cover the occluders' parallax across views plus the window.
        const bool close = near_rect(near, 6) || near_rect(far, 12);
        if (close) continue;
        ++n;
        kept += m.at(x, y) >= 0.5f;
      }
    CHECK(double(kept) / n >= 0.9);
  }
  SUBCASE("non-finite disparity") {
    CHECK_THROWS_AS(mask_at_disparity(lf, std::nan(""), model), ArgumentError);
  }
}
