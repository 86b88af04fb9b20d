#pragma once

#include <cstdint>

#include "isty/lightfield.hpp"
#include "isty/occlusion_synth.hpp"

namespace isty {

/// Multi-octave value noise in [0,1]; `cell` is the finest octave's period.
ViewImage value_noise(int width, int height, std::uint64_t seed, int cell = 2, int octaves = 3);

/// Renders a fronto-parallel textured plane at the given disparity: view
/// (du,dv) shows texture(x - du*d, y - dv*d).  `texture` must cover the frame
/// plus `margin` pixels on every side, with margin >= max |du*d|, |dv*d|.
LightField render_plane(const ViewImage& texture, int margin, int U, int V, int X, int Y,
                        double disparity);

/// Clean scene: one textured plane at a negative disparity.
LightField make_clean_scene(std::uint64_t seed, int U, int V, int X, int Y,
                            double disparity = -1.0);

/// Opaque procedural occluders (discs, bars, rectangles) with noisy color.
TemplatePool make_procedural_templates(std::uint64_t seed, int count, int min_size, int max_size);

}  // namespace isty
