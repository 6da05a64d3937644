#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mimicmark/image.hpp"

namespace mimicmark {

/// Deterministic natural-looking test image: fractal (1/f) luminance and
/// chroma fields, a sky-like gradient, and soft-edged textured objects.
ImageBuffer synth_natural_image(int width, int height, std::uint64_t seed);

/// `count` images from consecutive seeds derived from `seed`.
std::vector<ImageBuffer> synth_corpus(int count, int width, int height, std::uint64_t seed);

/// Raster files (.png/.jpg/.jpeg/.bmp) directly inside `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a file's bytes / of a buffer.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const void* data, std::size_t len);

}  // namespace mimicmark
