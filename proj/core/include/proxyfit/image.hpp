#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace proxyfit {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB image, row-major, tightly packed.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  size_t offset(int x, int y) const { return (static_cast<size_t>(y) * width + x) * 3; }
  Rgb at(int x, int y) const {
    const size_t o = offset(x, y);
    return {data[o], data[o + 1], data[o + 2]};
  }
  void set(int x, int y, const Rgb& c) {
    const size_t o = offset(x, y);
    data[o] = c[0];
    data[o + 1] = c[1];
    data[o + 2] = c[2];
  }
  bool operator==(const RgbImage&) const = default;
};

// Single-channel float image.
struct FloatMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FloatMap() = default;
  FloatMap(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}
  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  bool operator==(const FloatMap&) const = default;
};

void write_png(const std::string& path, const RgbImage& image);
RgbImage read_png(const std::string& path);

// Flat little-endian float32 planes (channel-major) plus a JSON header
// naming the planes; see docs/formats.md.
void write_float_maps(const std::string& bin_path, const std::string& header_path,
                      const std::vector<std::pair<std::string, const FloatMap*>>& planes);
std::vector<std::pair<std::string, FloatMap>> read_float_maps(const std::string& bin_path, const std::string& header_path);

}  // namespace proxyfit
