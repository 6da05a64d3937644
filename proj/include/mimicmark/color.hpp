#pragma once

#include "mimicmark/image.hpp"

namespace mimicmark {

// BT.601 full-range weights. Chroma planes are offset so achromatic input
// maps to kChromaZero.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaB = 0.114;
inline constexpr double kLumaG = 1.0 - kLumaR - kLumaB;
inline constexpr double kChromaZero = 128.0;

struct YuvPlanes {
  PlanarF64 y;
  PlanarF64 u;
  PlanarF64 v;
};

YuvPlanes rgb_to_yuv(const ImageBuffer& img);
ImageBuffer yuv_to_rgb(const PlanarF64& y, const PlanarF64& u, const PlanarF64& v);
inline ImageBuffer yuv_to_rgb(const YuvPlanes& p) { return yuv_to_rgb(p.y, p.u, p.v); }

/// Luma of a gray or RGB buffer as a real plane (gray passes through).
PlanarF64 luma_plane(const ImageBuffer& img);

/// Replace the luma of `img` with `luma`, keeping its chroma. Quantizes once.
ImageBuffer with_luma(const ImageBuffer& img, const PlanarF64& luma);

std::uint8_t quantize_sample(double v) noexcept;

}  // namespace mimicmark
