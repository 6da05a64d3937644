#include <algorithm>
#include <cmath>

#include "mimicmark/attacks.hpp"
#include "mimicmark/channel.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/image_io.hpp"
#include "mimicmark/rng.hpp"

namespace mimicmark {

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Mild: return "mild";
    case Severity::Standard: return "standard";
    case Severity::Harsh: return "harsh";
  }
  return "standard";
}

Severity parse_severity(std::string_view text) {
  if (text == "mild") return Severity::Mild;
  if (text == "standard") return Severity::Standard;
  if (text == "harsh") return Severity::Harsh;
  throw Error(Errc::BadParameter, "unknown severity '" + std::string(text) + "'");
}

DegradeProfile degrade_profile(Severity s) noexcept {
  switch (s) {
    case Severity::Mild: return {0.75, 1.0, 1.0, 32, 90, 0.01};
    case Severity::Standard: return {0.6, 3.0, 3.1, 32, 58, 0.02};
    case Severity::Harsh: return {0.5, 5.0, 6.0, 32, 40, 0.05};
  }
  return {0.6, 3.0, 3.1, 32, 58, 0.02};
}

namespace {

// Zero-mean Gaussian field with standard deviation ~sigma, smooth over
// `cell` pixels: normal draws on a coarse lattice, bilinearly interpolated.
std::vector<double> smooth_field(Rng& rng, int width, int height, int cell, double sigma) {
  const int gx = width / cell + 2, gy = height / cell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gx * gy));
  for (double& v : lattice) v = sigma * rng.normal();
  // Bilinear interpolation shrinks the variance by (2/3)^2 on average.
  const double gain = 1.5;
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double fy = (y + 0.5) / cell;
    const int y0 = static_cast<int>(fy);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = (x + 0.5) / cell;
      const int x0 = static_cast<int>(fx);
      const double tx = fx - x0;
      auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j * gx + i)]; };
      const double v = (at(x0, y0) * (1 - tx) + at(x0 + 1, y0) * tx) * (1 - ty) +
                       (at(x0, y0 + 1) * (1 - tx) + at(x0 + 1, y0 + 1) * tx) * ty;
      out[static_cast<std::size_t>(y) * width + x] = gain * v;
    }
  }
  return out;
}

}  // namespace

ImageBuffer surrogate_degrade(const ImageBuffer& img, Severity severity, std::uint64_t seed) {
  if (img.width < 1 || img.height < 1 || img.data.empty()) throw Error(Errc::EmptyPlane, "empty image");
  if (img.channels != 1 && img.channels != 3) throw Error(Errc::WrongChannelCount, "expected 1 or 3 channels");
  const DegradeProfile prof = degrade_profile(severity);
  Rng rng(seed);

  const int sw = std::max(1, static_cast<int>(std::lround(img.width * prof.scale)));
  const int sh = std::max(1, static_cast<int>(std::lround(img.height * prof.scale)));
  ImageBuffer out = resize_bilinear(resize_bilinear(img, sw, sh), img.width, img.height);

  double gains[3];
  for (double& g : gains) g = rng.uniform(1.0 - prof.jitter, 1.0 + prof.jitter);
  const std::vector<double> drift = smooth_field(rng, img.width, img.height, prof.drift_cell, prof.drift_sigma);
  const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < img.channels; ++c) {
      const std::size_t idx = i * img.channels + c;
      const double v = out.data[idx] * gains[c] + drift[i] + prof.noise_sigma * rng.normal();
      out.data[idx] = quantize_sample(v);
    }
  }
  return jpeg_roundtrip(out, prof.jpeg_quality);
}

}  // namespace mimicmark
