#pragma once

#include <filesystem>

#include "isty/lightfield.hpp"

namespace isty {

enum class LightFieldFormat {
  view_dir,    // <scene>/meta.json + <scene>/view_{u}_{v}.png
  grid_image,  // one PNG of U x V tiles + sidecar <name>.json with U, V
};

LightField load_lightfield(const std::filesystem::path& path, LightFieldFormat format);

/// Writes meta.json and one PNG per view into `dir` (created if needed).
void save_lightfield(const std::filesystem::path& dir, const LightField& lf);
/// Writes the tiled PNG and its sidecar.
void save_lightfield_grid(const std::filesystem::path& png, const LightField& lf);

/// Tile (u, v) occupies columns [u*X, (u+1)*X) and rows [v*Y, (v+1)*Y).
LightField lightfield_from_grid(const ViewImage& grid, int U, int V);
ViewImage lightfield_to_grid(const LightField& lf);

std::filesystem::path view_filename(int u, int v);

}  // namespace isty
