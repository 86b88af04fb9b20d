#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "isty/raster.hpp"

namespace isty {

struct DecodedImage {
  ViewImage rgb;
  std::optional<Raster<1>> alpha;  // present for RGBA / gray+alpha sources
  int bit_depth = 8;
};

/// Decode a PNG (or anything imgcodecs reads).  8- and 16-bit inputs are
/// normalized by their maximum code value.  Grayscale is replicated to RGB.
DecodedImage read_image(const std::filesystem::path& path);
DecodedImage decode_image(const std::vector<std::uint8_t>& bytes);

/// Single-channel read; color sources are converted with the BT.601 weights
/// used by imgcodecs.
Raster<1> read_gray(const std::filesystem::path& path);
Raster<1> decode_gray(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_png(const ViewImage& img, int bit_depth = 8);
std::vector<std::uint8_t> encode_png(const Raster<1>& img, int bit_depth = 8);
/// RGBA encode, used for occlusion templates.
std::vector<std::uint8_t> encode_png(const ViewImage& rgb, const Raster<1>& alpha,
                                     int bit_depth = 8);

void write_png(const std::filesystem::path& path, const ViewImage& img, int bit_depth = 8);
void write_png(const std::filesystem::path& path, const Raster<1>& img, int bit_depth = 8);
void write_png(const std::filesystem::path& path, const ViewImage& rgb,
               const Raster<1>& alpha, int bit_depth = 8);

}  // namespace isty
