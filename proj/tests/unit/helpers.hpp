#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "mimicmark/codec.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/image.hpp"
#include "mimicmark/rng.hpp"

namespace testutil {

using namespace mimicmark;

inline ImageBuffer noise_image(int w, int h, int c, std::uint64_t seed) {
  Rng rng(seed);
  ImageBuffer img(w, h, c);
  for (auto& s : img.data) s = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

inline PlanarF64 noise_plane(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  PlanarF64 p(w, h);
  for (double& v : p.data) v = rng.uniform(-100.0, 300.0);
  return p;
}

inline WatermarkPayload random_payload(Rng& rng, int n = 32) {
  BitVector bits(static_cast<std::size_t>(n));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
  return WatermarkPayload(bits);
}

inline SecretKey key(std::uint64_t seed) {
  Rng rng(seed);
  SecretKey k;
  for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rng.below(256));
  return k;
}

// Binomial(n, p) pmf at k computed from log-factorials.
inline double binom_pmf(int k, int n, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                  (n - k) * std::log1p(-p));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mimicmark-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil

#define CHECK_THROWS_CODE(expr, errc)                       \
  do {                                                      \
    try {                                                   \
      (void)(expr);                                         \
      FAIL("expected " #errc);                              \
    } catch (const mimicmark::Error& e) {                   \
      CHECK_MESSAGE(e.code() == (errc), e.what());          \
    }                                                       \
  } while (0)
