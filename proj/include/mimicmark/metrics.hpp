#pragma once

#include <limits>

#include "mimicmark/image.hpp"

namespace mimicmark {

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10*log10(255^2 / MSE) over all samples; kPsnrIdentical when MSE is zero.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
double mse(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace mimicmark
