#include "mimicmark/image.hpp"

#include <cmath>
#include <string>

#include "mimicmark/error.hpp"

namespace mimicmark {

ImageBuffer::ImageBuffer(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0) throw Error(Errc::DimensionMismatch, "image dimensions must be positive");
  if (c != 1 && c != 3) throw Error(Errc::WrongChannelCount, "expected 1 or 3 channels, got " + std::to_string(c));
  data.assign(pixel_count() * static_cast<std::size_t>(c), fill);
}

ImageBuffer::ImageBuffer(int w, int h, int c, std::vector<std::uint8_t> samples)
    : ImageBuffer(w, h, c) {
  if (samples.size() != data.size())
    throw Error(Errc::DimensionMismatch, "sample count " + std::to_string(samples.size()) + " does not match " +
                                             std::to_string(w) + "x" + std::to_string(h) + "x" + std::to_string(c));
  data = std::move(samples);
}

PlanarF64::PlanarF64(int w, int h, double fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw Error(Errc::DimensionMismatch, "plane dimensions must be non-negative");
  data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

bool PlanarF64::all_finite() const noexcept {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_watermarkable(const ImageBuffer& img) {
  if (img.width < kMinWatermarkEdge || img.height < kMinWatermarkEdge)
    throw Error(Errc::TooSmall, std::to_string(img.width) + "x" + std::to_string(img.height) +
                                    " is below the " + std::to_string(kMinWatermarkEdge) + "x" +
                                    std::to_string(kMinWatermarkEdge) + " minimum");
}

}  // namespace mimicmark
