#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "isty/image_io.hpp"
#include "isty/lightfield_io.hpp"

using namespace isty;
using isty::testing::TempDir;
namespace fs = std::filesystem;

namespace {

void write_meta(const fs::path& dir, int U, int V, int X, int Y) {
  std::ofstream(dir / "meta.json") << "{\"U\":" << U << ",\"V\":" << V << ",\"X\":" << X
                                   << ",\"Y\":" << Y << ",\"bit_depth\":8}";
}

}  // namespace

TEST_CASE("view_dir of white PNGs loads as all ones") {
  TempDir tmp("white");
  write_meta(tmp.path(), 5, 5, 8, 8);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u) write_png(tmp.path() / view_filename(u, v), ViewImage(8, 8, 1.0f));
  auto lf = load_lightfield(tmp.path(), LightFieldFormat::view_dir);
  CHECK(lf.U() == 5);
  CHECK(lf.X() == 8);
  for (float s : lf.data()) REQUIRE(s == 1.0f);
}

TEST_CASE("grid image matches a hand-assembled light field") {
  TempDir tmp("grid");
  // tile (u,v) pixel (x,y) gets code (u*40 + v*8 + x + y) per channel offset
  ViewImage grid(5 * 8, 5 * 8);
  LightField expected(5, 5, 8, 8);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u)
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          for (int c = 0; c < 3; ++c) {
            const int code = (u * 40 + v * 8 + x + y + c * 3) % 256;
            grid.at(u * 8 + x, v * 8 + y, c) = code / 255.0f;
            expected.at(u, v, x, y, c) = code / 255.0f;
          }
  write_png(tmp.path() / "scene.png", grid);
  std::ofstream(tmp.path() / "scene.json") << R"({"U":5,"V":5,"X":8,"Y":8})";
  auto lf = load_lightfield(tmp.path() / "scene.png", LightFieldFormat::grid_image);
  CHECK(lf == expected);

  save_lightfield(tmp.path() / "dir", lf);
  CHECK(load_lightfield(tmp.path() / "dir", LightFieldFormat::view_dir) == lf);
}

TEST_CASE("missing view names its index") {
  TempDir tmp("missing");
  write_meta(tmp.path(), 5, 5, 4, 4);
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u)
      if (!(u == 2 && v == 3)) write_png(tmp.path() / view_filename(u, v), ViewImage(4, 4, 0.5f));
  try {
    load_lightfield(tmp.path(), LightFieldFormat::view_dir);
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
  }
}

TEST_CASE("inconsistent view sizes are a format error") {
  TempDir tmp("sizes");
  write_meta(tmp.path(), 3, 3, 4, 4);
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 3; ++u)
      write_png(tmp.path() / view_filename(u, v), ViewImage(u == 1 && v == 1 ? 5 : 4, 4, 0.5f));
  CHECK_THROWS_AS(load_lightfield(tmp.path(), LightFieldFormat::view_dir), FormatError);
}

TEST_CASE("16-bit views normalize by 65535") {
  TempDir tmp("deep");
  LightField lf(3, 3, 4, 2);
  for (std::size_t i = 0; i < lf.data().size(); ++i)
    lf.data()[i] = static_cast<float>((i * 997 % 65536) / 65535.0);
  lf.bit_depth = 16;
  save_lightfield(tmp.path(), lf);
  auto back = load_lightfield(tmp.path(), LightFieldFormat::view_dir);
  CHECK(back.bit_depth == 16);
  CHECK(isty::testing::max_abs_diff(back.data(), lf.data()) < 1e-7);
}

TEST_CASE("RGBA round trip keeps alpha") {
  ViewImage rgb(3, 2, 0.2f);
  Raster<1> alpha(3, 2, 1.0f);
  alpha.at(1, 1) = 0.0f;
  auto dec = decode_image(encode_png(rgb, alpha));
  REQUIRE(dec.alpha.has_value());
  CHECK(dec.alpha->at(1, 1) == 0.0f);
  CHECK(dec.alpha->at(0, 0) == 1.0f);
  CHECK(std::abs(dec.rgb.at(2, 1, 2) - 51 / 255.0f) < 1e-7);
}
