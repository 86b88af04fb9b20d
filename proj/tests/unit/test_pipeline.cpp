#include "torch_doctest.hpp"
#include "isty/error.hpp"
#include "isty/nn/pipeline.hpp"
#include "isty/synthetic.hpp"

using namespace isty;
using namespace isty::nn;

namespace {

DeoccPipeline tiny_pipeline() {
  torch::manual_seed(3);
  IstyNet net(tiny_config());
  return DeoccPipeline(net, FbsConfig{});
}

}  // namespace

TEST_CASE("deocclusion pipeline") {
  const DeoccPipeline pipe = tiny_pipeline();
  // 40 x 30 is not a multiple of 2^K = 8 and exercises the padding path.
  const LightField lf = make_clean_scene(12, 5, 5, 40, 30);

  SUBCASE("output shapes and ranges") {
    const auto r = pipe.run(lf);
    CHECK(r.mask.width() == 40);
    CHECK(r.mask.height() == 30);
    CHECK(r.out.width() == 40);
    CHECK(r.out.height() == 30);
    for (float v : r.mask.data()) REQUIRE((v >= 0.0f && v <= 1.0f));
    for (float v : r.out.data()) REQUIRE((v >= 0.0f && v <= 1.0f));
  }
  SUBCASE("repeat calls are identical") {
    CHECK(pipe.generate(lf) == pipe.generate(lf));
    const SoftMask m(40, 30, 0.3f);
    CHECK(pipe.inpaint(lf, m) == pipe.inpaint(lf, m));
  }
  SUBCASE("d = 0 reproduces the standard mask") {
    CHECK(mask_at_disparity(lf, 0.0, pipe) == pipe.generate(lf));
    CHECK(mask_at_disparity(lf, 0.0, pipe) == pipe.run(lf).mask);
  }
  SUBCASE("full keep mask returns the center view") {
    CHECK(pipe.inpaint(lf, SoftMask(40, 30, 1.0f)) == center_view(lf));
  }
  SUBCASE("kept pixels pass through under a mixed mask") {
    SoftMask m(40, 30, 1.0f);
    for (int y = 8; y < 20; ++y)
      for (int x = 10; x < 25; ++x) m.at(x, y) = 0.0f;
    const ViewImage out = pipe.inpaint(lf, m), cv = center_view(lf);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 40; ++x)
        if (m.at(x, y) == 1.0f)
          for (int c = 0; c < 3; ++c) REQUIRE(out.at(x, y, c) == cv.at(x, y, c));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(pipe.run(make_clean_scene(1, 3, 3, 40, 30)), ConfigError);
    CHECK_THROWS_AS(pipe.inpaint(lf, SoftMask(20, 30, 1.0f)), ArgumentError);
  }
}
