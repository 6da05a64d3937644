#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mimicmark/image.hpp"

namespace mimicmark {

enum class ImageFormat { Png, Jpeg, Bmp };

struct SaveOptions {
  ImageFormat format = ImageFormat::Png;
  int jpeg_quality = 95;  // 1..100
};

ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const ImageBuffer& img, const std::filesystem::path& path, const SaveOptions& opts = {});

/// In-memory codecs. decode_image sniffs PNG/JPEG/BMP magic bytes.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_image(const ImageBuffer& img, const SaveOptions& opts);

/// Baseline JPEG encode+decode at `quality`.
ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality);

/// Format implied by a file extension (.png, .jpg/.jpeg, .bmp); throws UnsupportedFormat.
ImageFormat format_from_extension(const std::filesystem::path& path);

}  // namespace mimicmark
