#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mimicmark {

/// Minimum edge length accepted by the watermark codecs.
inline constexpr int kMinWatermarkEdge = 64;

/// Interleaved 8-bit raster, row-major, 1 (gray) or 3 (RGB) channels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int c, std::uint8_t fill = 0);
  ImageBuffer(int w, int h, int c, std::vector<std::uint8_t> samples);

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  std::uint8_t at(int x, int y, int c = 0) const noexcept { return data[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) noexcept { return data[index(x, y, c)]; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width == other.width && height == other.height && channels == other.channels;
  }
  bool operator==(const ImageBuffer&) const = default;
};

/// One real-valued working plane (luma, a chroma plane, a subband).
struct PlanarF64 {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  PlanarF64() = default;
  PlanarF64(int w, int h, double fill = 0.0);

  std::size_t size() const noexcept { return data.size(); }
  bool empty() const noexcept { return data.empty(); }
  double at(int x, int y) const noexcept {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  double& at(int x, int y) noexcept {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  bool same_shape(const PlanarF64& other) const noexcept {
    return width == other.width && height == other.height;
  }
  bool all_finite() const noexcept;
};

/// Throws TooSmall unless both edges are at least kMinWatermarkEdge.
void require_watermarkable(const ImageBuffer& img);

}  // namespace mimicmark
