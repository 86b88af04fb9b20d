#include "isty/lightfield_io.hpp"

#include <fstream>
#include <string>

#include "json.hpp"

#include "isty/image_io.hpp"

namespace isty {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw LoadError("missing descriptor: " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("malformed descriptor " + p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  f << j.dump(2) << "\n";
}

int required_int(const json& j, const char* key, const fs::path& where) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw FormatError(where.string() + ": missing integer field '" + key + "'");
  }
  return j[key].get<int>();
}

}  // namespace

fs::path view_filename(int u, int v) {
  return "view_" + std::to_string(u) + "_" + std::to_string(v) + ".png";
}

LightField lightfield_from_grid(const ViewImage& grid, int U, int V) {
  if (U <= 0 || V <= 0 || grid.width() % U != 0 || grid.height() % V != 0) {
    throw FormatError("grid image size is not a multiple of the angular size");
  }
  const int X = grid.width() / U, Y = grid.height() / V;
  LightField lf(U, V, X, Y);
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < U; ++u)
      for (int y = 0; y < Y; ++y)
        for (int x = 0; x < X; ++x)
          for (int c = 0; c < 3; ++c) lf.at(u, v, x, y, c) = grid.at(u * X + x, v * Y + y, c);
  return lf;
}

ViewImage lightfield_to_grid(const LightField& lf) {
  ViewImage grid(lf.U() * lf.X(), lf.V() * lf.Y());
  for (int v = 0; v < lf.V(); ++v)
    for (int u = 0; u < lf.U(); ++u)
      for (int y = 0; y < lf.Y(); ++y)
        for (int x = 0; x < lf.X(); ++x)
          for (int c = 0; c < 3; ++c)
            grid.at(u * lf.X() + x, v * lf.Y() + y, c) = lf.at(u, v, x, y, c);
  return grid;
}

LightField load_lightfield(const fs::path& path, LightFieldFormat format) {
  if (!fs::exists(path)) throw LoadError("no such light field: " + path.string());

  if (format == LightFieldFormat::grid_image) {
    fs::path sidecar = path;
    sidecar.replace_extension(".json");
    const json meta = read_json(sidecar);
    const int U = required_int(meta, "U", sidecar);
    const int V = required_int(meta, "V", sidecar);
    DecodedImage img = read_image(path);
    LightField lf = lightfield_from_grid(img.rgb, U, V);
    if ((meta.contains("X") && meta["X"].get<int>() != lf.X()) ||
        (meta.contains("Y") && meta["Y"].get<int>() != lf.Y())) {
      throw FormatError("grid tile size disagrees with sidecar " + sidecar.string());
    }
    lf.bit_depth = img.bit_depth;
    lf.disparity_unit = meta.value("disparity_unit", 1.0);
    lf.validate();
    return lf;
  }

  const fs::path meta_path = path / "meta.json";
  const json meta = read_json(meta_path);
  const int U = required_int(meta, "U", meta_path);
  const int V = required_int(meta, "V", meta_path);
  const int X = required_int(meta, "X", meta_path);
  const int Y = required_int(meta, "Y", meta_path);
  LightField lf(U, V, X, Y);
  lf.disparity_unit = meta.value("disparity_unit", 1.0);
  lf.bit_depth = meta.value("bit_depth", 8);
  for (int v = 0; v < V; ++v) {
    for (int u = 0; u < U; ++u) {
      const fs::path p = path / view_filename(u, v);
      if (!fs::exists(p)) {
        throw LoadError("missing view (" + std::to_string(u) + "," + std::to_string(v) +
                        "): " + p.string());
      }
      DecodedImage img = read_image(p);
      if (img.rgb.width() != X || img.rgb.height() != Y) {
        throw FormatError("view (" + std::to_string(u) + "," + std::to_string(v) +
                          ") has size " + std::to_string(img.rgb.width()) + "x" +
                          std::to_string(img.rgb.height()) + ", expected " +
                          std::to_string(X) + "x" + std::to_string(Y));
      }
      lf.set_view(u, v, img.rgb);
    }
  }
  lf.validate();
  return lf;
}

void save_lightfield(const fs::path& dir, const LightField& lf) {
  fs::create_directories(dir);
  const int depth = lf.bit_depth == 16 ? 16 : 8;
  write_json(dir / "meta.json", json{{"U", lf.U()},
                                     {"V", lf.V()},
                                     {"X", lf.X()},
                                     {"Y", lf.Y()},
                                     {"bit_depth", depth},
                                     {"disparity_unit", lf.disparity_unit}});
  for (int v = 0; v < lf.V(); ++v)
    for (int u = 0; u < lf.U(); ++u) write_png(dir / view_filename(u, v), lf.view(u, v), depth);
}

void save_lightfield_grid(const fs::path& png, const LightField& lf) {
  const int depth = lf.bit_depth == 16 ? 16 : 8;
  write_png(png, lightfield_to_grid(lf), depth);
  fs::path sidecar = png;
  sidecar.replace_extension(".json");
  write_json(sidecar, json{{"U", lf.U()},
                           {"V", lf.V()},
                           {"X", lf.X()},
                           {"Y", lf.Y()},
                           {"bit_depth", depth},
                           {"disparity_unit", lf.disparity_unit}});
}

}  // namespace isty
