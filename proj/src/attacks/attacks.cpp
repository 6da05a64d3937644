#include <algorithm>
#include <cmath>
#include <numbers>

#include "mimicmark/attacks.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/image_io.hpp"
#include "mimicmark/metrics.hpp"

namespace mimicmark {
namespace {

// Mirror without repeating the edge sample: -1 -> 1, n -> n-2.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::vector<double> gaussian_taps(double sigma, int kernel) {
  std::vector<double> taps(static_cast<std::size_t>(kernel));
  const int r = kernel / 2;
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[static_cast<std::size_t>(i + r)] = w;
    sum += w;
  }
  for (double& w : taps) w /= sum;
  return taps;
}

double bilinear(const ImageBuffer& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0, fy = y - y0;
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int w, int h) {
  ImageBuffer out(w, h, img.channels);
  for (int y = 0; y < h; ++y)
    std::copy_n(img.data.begin() + static_cast<std::ptrdiff_t>(img.index(x0, y0 + y)),
                static_cast<std::ptrdiff_t>(w) * img.channels,
                out.data.begin() + static_cast<std::ptrdiff_t>(out.index(0, y)));
  return out;
}

ImageBuffer map_samples(const ImageBuffer& img, auto&& fn) {
  ImageBuffer out = img;
  for (auto& s : out.data) s = quantize_sample(fn(static_cast<double>(s)));
  return out;
}

ImageBuffer rotate_hue(const ImageBuffer& img, double degrees) {
  if (img.channels == 1) return img;
  YuvPlanes p = rgb_to_yuv(img);
  const double t = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  for (std::size_t i = 0; i < p.u.size(); ++i) {
    const double u = p.u.data[i] - kChromaZero, v = p.v.data[i] - kChromaZero;
    p.u.data[i] = c * u - s * v + kChromaZero;
    p.v.data[i] = s * u + c * v + kChromaZero;
  }
  return yuv_to_rgb(p);
}

ImageBuffer rotate(const ImageBuffer& img, double degrees) {
  if (std::fmod(degrees, 360.0) == 0.0) return img;
  const double t = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const double cx = 0.5 * (img.width - 1), cy = 0.5 * (img.height - 1);
  ImageBuffer out(img.width, img.height, img.channels);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      // Inverse map: output pixel -> source coordinate.
      const double dx = x - cx, dy = y - cy;
      const double sx = c * dx + s * dy + cx, sy = -s * dx + c * dy + cy;
      const bool inside = sx >= -0.5 && sy >= -0.5 && sx <= img.width - 0.5 && sy <= img.height - 0.5;
      for (int ch = 0; ch < img.channels; ++ch)
        out.at(x, y, ch) = inside ? quantize_sample(bilinear(img, sx, sy, ch)) : 0;
    }
  return out;
}

ImageBuffer center_crop(const ImageBuffer& img, double keep_ratio) {
  const double side = std::sqrt(keep_ratio);
  const int w = std::clamp(static_cast<int>(std::lround(img.width * side)), 1, img.width);
  const int h = std::clamp(static_cast<int>(std::lround(img.height * side)), 1, img.height);
  if (w == img.width && h == img.height) return img;
  return resize_bilinear(crop(img, (img.width - w) / 2, (img.height - h) / 2, w, h), img.width, img.height);
}

ImageBuffer resize_roundtrip(const ImageBuffer& img, double scale) {
  const int w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height * scale)));
  if (w == img.width && h == img.height) return img;
  return resize_bilinear(resize_bilinear(img, w, h), img.width, img.height);
}

ImageBuffer meme(const ImageBuffer& img, double band_ratio) {
  ImageBuffer out = img;
  const int band = std::min(img.height / 2, static_cast<int>(std::lround(img.height * band_ratio)));
  for (int y = 0; y < band; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        out.at(x, y, c) = 255;
        out.at(x, img.height - 1 - y, c) = 255;
      }
  return out;
}

ImageBuffer overlay(const ImageBuffer& img, const attack::Overlay& o) {
  try {
    return embed(img, o.payload, o.config).watermarked;
  } catch (const Error& e) {
    if (e.code() == Errc::CapacityExceeded) throw Error(Errc::OverlayCapacityExceeded, e.what());
    throw;
  }
}

}  // namespace

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma, int kernel) {
  const std::vector<double> taps = gaussian_taps(sigma, kernel);
  const int r = kernel / 2, w = img.width, h = img.height, nc = img.channels;
  std::vector<double> horiz(img.data.size());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += taps[static_cast<std::size_t>(i + r)] * img.at(reflect(x + i, w), y, c);
        horiz[img.index(x, y, c)] = acc;
      }
  ImageBuffer out(w, h, nc);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += taps[static_cast<std::size_t>(i + r)] * horiz[img.index(x, reflect(y + i, h), c)];
        out.at(x, y, c) = quantize_sample(acc);
      }
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(Errc::BadParameter, "resize target must be positive");
  ImageBuffer out(width, height, img.channels);
  const double sx = static_cast<double>(img.width) / width, sy = static_cast<double>(img.height) / height;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < img.channels; ++c)
        out.at(x, y, c) = quantize_sample(bilinear(img, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5, c));
  return out;
}

namespace reference {

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma, int kernel) {
  const std::vector<double> taps = gaussian_taps(sigma, kernel);
  const int r = kernel / 2;
  ImageBuffer out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (int j = -r; j <= r; ++j)
          for (int i = -r; i <= r; ++i)
            acc += taps[static_cast<std::size_t>(i + r)] * taps[static_cast<std::size_t>(j + r)] *
                   img.at(reflect(x + i, img.width), reflect(y + j, img.height), c);
        out.at(x, y, c) = quantize_sample(acc);
      }
  return out;
}

}  // namespace reference

AttackedImage apply_attack(const ImageBuffer& img, const AttackSpec& spec) {
  spec.validate();
  ImageBuffer result = std::visit(
      [&](const auto& a) -> ImageBuffer {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, attack::Jpeg>) return jpeg_roundtrip(img, a.quality);
        else if constexpr (std::is_same_v<T, attack::GaussianBlur>) return gaussian_blur(img, a.sigma, a.kernel);
        else if constexpr (std::is_same_v<T, attack::Brightness>)
          return map_samples(img, [f = a.factor](double s) { return s * f; });
        else if constexpr (std::is_same_v<T, attack::Contrast>) {
          const PlanarF64 y = luma_plane(img);
          double mean = 0.0;
          for (double v : y.data) mean += v;
          mean = std::round(mean / static_cast<double>(y.size()));
          return map_samples(img, [f = a.factor, mean](double s) { return mean + f * (s - mean); });
        } else if constexpr (std::is_same_v<T, attack::Hue>) return rotate_hue(img, a.degrees);
        else if constexpr (std::is_same_v<T, attack::CenterCrop>) return center_crop(img, a.keep_ratio);
        else if constexpr (std::is_same_v<T, attack::Resize>) return resize_roundtrip(img, a.scale);
        else if constexpr (std::is_same_v<T, attack::Rotation>) return rotate(img, a.degrees);
        else if constexpr (std::is_same_v<T, attack::Meme>) return meme(img, a.band_ratio);
        else return overlay(img, a);
      },
      spec.kind);
  const double q = psnr(img, result);
  return AttackedImage{std::move(result), spec, q};
}

BitAccuracy attack_then_extract(const ImageBuffer& watermarked, const AttackSpec& spec, const CodecConfig& config,
                                const WatermarkPayload& payload) {
  if (const auto* o = std::get_if<attack::Overlay>(&spec.kind))
    if (o->config.method == config.method && o->config.key == config.key)
      throw Error(Errc::BadParameter, "overlay must differ from the victim codec in key or method");
  const AttackedImage attacked = apply_attack(watermarked, spec);
  return bit_accuracy(extract(attacked.image, config).bits, payload);
}

}  // namespace mimicmark
