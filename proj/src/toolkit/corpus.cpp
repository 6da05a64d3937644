#include "mimicmark/corpus.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "mimicmark/color.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/image_io.hpp"
#include "mimicmark/rng.hpp"

namespace mimicmark {
namespace {

// Smooth value noise on a lattice of `cells` per image width.
class ValueNoise {
 public:
  ValueNoise(Rng& rng, int cells_x, int cells_y) : cx_(cells_x + 2), cy_(cells_y + 2), lattice_(static_cast<std::size_t>(cx_ * cy_)) {
    for (double& v : lattice_) v = rng.uniform(-1.0, 1.0);
  }

  // u, v in [0, 1]
  double operator()(double u, double v) const {
    const double x = u * (cx_ - 2), y = v * (cy_ - 2);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const double fx = fade(x - x0), fy = fade(y - y0);
    const double a = at(x0, y0), b = at(x0 + 1, y0), c = at(x0, y0 + 1), d = at(x0 + 1, y0 + 1);
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
  double at(int x, int y) const { return lattice_[static_cast<std::size_t>(std::min(y, cy_ - 1) * cx_ + std::min(x, cx_ - 1))]; }

  int cx_, cy_;
  std::vector<double> lattice_;
};

// Fractal sum with amplitude halving per octave (approximately 1/f).
class Fbm {
 public:
  Fbm(Rng& rng, int base_cells, int octaves, double aspect) {
    for (int o = 0; o < octaves; ++o) {
      const int cells = base_cells << o;
      layers_.emplace_back(rng, cells, std::max(1, static_cast<int>(cells * aspect)));
    }
  }
  double operator()(double u, double v) const {
    double acc = 0.0, amp = 1.0, norm = 0.0;
    for (const auto& l : layers_) {
      acc += amp * l(u, v);
      norm += amp;
      amp *= 0.5;
    }
    return acc / norm;
  }

 private:
  std::vector<ValueNoise> layers_;
};

struct Blob {
  double cx, cy, rx, ry, angle;
  bool rectangle;
  double y, u, v;       // fill colour in YUV
  double texture_amp;
  double edge;          // soft edge width in pixels
};

}  // namespace

ImageBuffer synth_natural_image(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  const double aspect = static_cast<double>(height) / width;
  const Fbm luma(rng, 3, 7, aspect), chroma_u(rng, 2, 4, aspect), chroma_v(rng, 2, 4, aspect);
  const Fbm fine(rng, 24, 3, aspect);

  const double base = rng.uniform(90.0, 160.0);
  const double contrast = rng.uniform(45.0, 80.0);
  const double grad = rng.uniform(-40.0, 40.0);
  const double tint_u = rng.uniform(-25.0, 25.0), tint_v = rng.uniform(-25.0, 25.0);

  std::vector<Blob> blobs(static_cast<std::size_t>(5 + rng.below(8)));
  for (Blob& b : blobs) {
    b.cx = rng.uniform(0.0, width);
    b.cy = rng.uniform(0.0, height);
    b.rx = rng.uniform(0.04, 0.25) * width;
    b.ry = rng.uniform(0.04, 0.25) * height;
    b.angle = rng.uniform(0.0, 3.14159);
    b.rectangle = rng.uniform() < 0.35;
    b.y = rng.uniform(30.0, 225.0);
    b.u = rng.uniform(-45.0, 45.0);
    b.v = rng.uniform(-45.0, 45.0);
    b.texture_amp = rng.uniform() < 0.5 ? rng.uniform(4.0, 28.0) : rng.uniform(0.0, 4.0);
    b.edge = rng.uniform(0.6, 3.0);
  }

  // Sensor grain, drawn serially so the image does not depend on thread count.
  const double grain_sigma = rng.uniform(1.0, 4.0);
  PlanarF64 grain(width, height);
  for (double& g : grain.data) g = grain_sigma * rng.normal();

  PlanarF64 py(width, height), pu(width, height), pv(width, height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width, v = (y + 0.5) / height;
      double ly = base + contrast * luma(u, v) + grad * (v - 0.5);
      double lu = kChromaZero + tint_u + 30.0 * chroma_u(u, v);
      double lv = kChromaZero + tint_v + 30.0 * chroma_v(u, v);
      for (const Blob& b : blobs) {
        const double dx = x - b.cx, dy = y - b.cy;
        const double ca = std::cos(b.angle), sa = std::sin(b.angle);
        const double px = (ca * dx + sa * dy) / b.rx, qy = (-sa * dx + ca * dy) / b.ry;
        // Signed distance (approximate, in pixels) to the blob boundary.
        const double r = b.rectangle ? std::max(std::abs(px), std::abs(qy)) : std::sqrt(px * px + qy * qy);
        const double dist = (r - 1.0) * std::min(b.rx, b.ry);
        const double cover = std::clamp(0.5 - dist / b.edge, 0.0, 1.0);
        if (cover <= 0.0) continue;
        const double texture = b.texture_amp * fine(u, v);
        ly = ly * (1 - cover) + (b.y + texture + 0.35 * contrast * luma(v, u)) * cover;
        lu = lu * (1 - cover) + (kChromaZero + b.u) * cover;
        lv = lv * (1 - cover) + (kChromaZero + b.v) * cover;
      }
      py.at(x, y) = ly + grain.at(x, y);
      pu.at(x, y) = lu;
      pv.at(x, y) = lv;
    }
  }
  return yuv_to_rgb(py, pu, pv);
}

std::vector<ImageBuffer> synth_corpus(int count, int width, int height, std::uint64_t seed) {
  std::vector<ImageBuffer> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = synth_natural_image(width, height, Rng::mix(seed, static_cast<std::uint64_t>(i)));
  return out;
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(Errc::FileNotFound, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    try {
      format_from_extension(entry.path());
      out.push_back(entry.path());
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string sha256_hex(const void* data, std::size_t len) {
  if (sodium_init() < 0) throw Error(Errc::IoError, "libsodium failed to initialize");
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, static_cast<const unsigned char*>(data), len);
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes.data(), bytes.size());
}

}  // namespace mimicmark
