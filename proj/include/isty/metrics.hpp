#pragma once

#include <optional>

#include "isty/raster.hpp"

namespace isty {

inline constexpr double kPsnrCap = 100.0;

/// 10*log10(1/MSE) with peak 1.0, capped at kPsnrCap.  With a mask the MSE
/// only covers pixels whose mask value is below 0.5 (the occluded region).
double psnr(const ViewImage& a, const ViewImage& b,
            const std::optional<SoftMask>& mask = std::nullopt);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;
};

/// Single-scale SSIM over the valid window positions, averaged over color
/// channels and positions.
double ssim(const ViewImage& a, const ViewImage& b, const SsimParams& p = {});

}  // namespace isty
