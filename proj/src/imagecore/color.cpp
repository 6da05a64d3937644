#include "mimicmark/color.hpp"

#include <algorithm>
#include <cmath>

#include "mimicmark/error.hpp"

namespace mimicmark {
namespace {

// Chroma scale factors so U,V span [-0.5, 0.5] * 255 around the offset.
constexpr double kUScale = 0.5 / (1.0 - kLumaB);
constexpr double kVScale = 0.5 / (1.0 - kLumaR);

// Exact algebraic inverse of the forward matrix.
constexpr double kRFromV = 2.0 * (1.0 - kLumaR);
constexpr double kBFromU = 2.0 * (1.0 - kLumaB);
constexpr double kGFromU = kLumaB * kBFromU / kLumaG;
constexpr double kGFromV = kLumaR * kRFromV / kLumaG;

}  // namespace

std::uint8_t quantize_sample(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

YuvPlanes rgb_to_yuv(const ImageBuffer& img) {
  if (img.channels != 3) throw Error(Errc::WrongChannelCount, "rgb_to_yuv needs a 3-channel image");
  YuvPlanes out{PlanarF64(img.width, img.height), PlanarF64(img.width, img.height),
                PlanarF64(img.width, img.height)};
  const std::size_t n = img.pixel_count();
  const std::uint8_t* src = img.data.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = src[3 * i], g = src[3 * i + 1], b = src[3 * i + 2];
    const double y = kLumaR * r + kLumaG * g + kLumaB * b;
    out.y.data[i] = y;
    out.u.data[i] = (b - y) * kUScale + kChromaZero;
    out.v.data[i] = (r - y) * kVScale + kChromaZero;
  }
  return out;
}

ImageBuffer yuv_to_rgb(const PlanarF64& y, const PlanarF64& u, const PlanarF64& v) {
  if (!y.same_shape(u) || !y.same_shape(v))
    throw Error(Errc::DimensionMismatch, "Y, U and V planes must share dimensions");
  ImageBuffer out(y.width, y.height, 3);
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double cy = y.data[i], cu = u.data[i] - kChromaZero, cv = v.data[i] - kChromaZero;
    out.data[3 * i] = quantize_sample(cy + kRFromV * cv);
    out.data[3 * i + 1] = quantize_sample(cy - kGFromU * cu - kGFromV * cv);
    out.data[3 * i + 2] = quantize_sample(cy + kBFromU * cu);
  }
  return out;
}

PlanarF64 luma_plane(const ImageBuffer& img) {
  if (img.channels == 3) return rgb_to_yuv(img).y;
  if (img.channels != 1) throw Error(Errc::WrongChannelCount, "expected 1 or 3 channels");
  PlanarF64 y(img.width, img.height);
  std::transform(img.data.begin(), img.data.end(), y.data.begin(),
                 [](std::uint8_t s) { return static_cast<double>(s); });
  return y;
}

ImageBuffer with_luma(const ImageBuffer& img, const PlanarF64& luma) {
  if (luma.width != img.width || luma.height != img.height)
    throw Error(Errc::DimensionMismatch, "luma plane does not match image dimensions");
  if (img.channels == 1) {
    ImageBuffer out(img.width, img.height, 1);
    std::transform(luma.data.begin(), luma.data.end(), out.data.begin(), quantize_sample);
    return out;
  }
  YuvPlanes planes = rgb_to_yuv(img);
  return yuv_to_rgb(luma, planes.u, planes.v);
}

}  // namespace mimicmark
