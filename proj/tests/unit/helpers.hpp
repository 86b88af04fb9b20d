#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "isty/lightfield.hpp"
#include "isty/rng.hpp"

namespace isty::testing {

inline LightField random_lightfield(int U, int V, int X, int Y, std::uint64_t seed) {
  LightField lf(U, V, X, Y);
  Rng rng(seed);
  for (float& s : lf.data()) s = static_cast<float>(rng.uniform());
  return lf;
}

/// Slowly varying field, the same in every view up to a small per-view
/// offset.  Second derivatives stay below 5e-4 per pixel^2.
inline LightField smooth_lightfield(int U, int V, int X, int Y) {
  LightField lf(U, V, X, Y);
  for (int v = 0; v < V; ++v)
    for (int u = 0; u < U; ++u)
      for (int y = 0; y < Y; ++y)
        for (int x = 0; x < X; ++x)
          for (int c = 0; c < 3; ++c)
            lf.at(u, v, x, y, c) = static_cast<float>(
                0.5 + 0.2 * std::sin(0.045 * x + 0.7 * c) * std::cos(0.035 * y) + 0.01 * (u - v));
  return lf;
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("isty_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace isty::testing
