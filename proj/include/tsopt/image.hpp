#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsopt/errors.hpp"

namespace tsopt {

// Pixel raster with real-valued samples in [0, 255], row-major and channel
// interleaved. Doubles rather than bytes: the disturbance contracts carry
// tolerances (1e-9) that 8-bit or float storage could not honor.
struct Image {
  std::size_t height = 0, width = 0, channels = 1;
  std::vector<double> px;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), px(h * w * c, fill) {}

  double& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return px[(y * width + x) * channels + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return px[(y * width + x) * channels + c];
  }
  std::size_t pixel_count() const { return height * width; }
  bool same_shape(const Image& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

// Binary PGM (P5) / PPM (P6), 8-bit. Values are rounded half-up and clamped
// on write; reads widen bytes to doubles.
Image read_pnm(const std::string& path);
void write_pnm(const Image& img, const std::string& path);

}  // namespace tsopt
