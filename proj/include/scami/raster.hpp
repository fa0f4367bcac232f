#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace scami {

// Floating-point RGB image. Channels live in [0,1] after load; storage is
// row-major with pixel centers at (x + 0.5, y + 0.5) in pixel units.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::array<double, 3>> pixels;

  Raster() = default;
  Raster(int w, int h, std::array<double, 3> fill = {0.0, 0.0, 0.0});

  std::array<double, 3>& at(int x, int y) {
    return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)];
  }
  const std::array<double, 3>& at(int x, int y) const {
    return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)];
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  // Exact (0,0,0) — the background test used by the mask policy.
  bool is_black(int x, int y) const {
    const auto& p = at(x, y);
    return p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0;
  }
};

// Reads a PNG or binary PPM (P6), dispatching on the magic bytes.
// 8-bit sample v maps to v/255 (16-bit to v/65535); values are clamped
// into [0,1]. Alpha channels are not supported and raise FormatError.
Raster load_raster(const std::string& path);

Raster load_png(const std::string& path);
Raster load_ppm(const std::string& path);

// 8-bit writers, rounding channel * 255 to nearest.
void save_ppm(const Raster& r, const std::string& path);
void save_png(const Raster& r, const std::string& path);

}  // namespace scami
