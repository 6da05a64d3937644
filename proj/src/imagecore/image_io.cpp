#include "mimicmark/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/core/utils/logger.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "mimicmark/error.hpp"

namespace mimicmark {
namespace {

void silence_opencv() {
  static const bool once = [] {
    cv::utils::logging::setLogLevel(cv::utils::logging::LOG_LEVEL_SILENT);
    return true;
  }();
  (void)once;
}

bool has_prefix(std::span<const std::uint8_t> bytes, std::initializer_list<std::uint8_t> magic) {
  if (bytes.size() < magic.size()) return false;
  return std::equal(magic.begin(), magic.end(), bytes.begin());
}

ImageFormat sniff(std::span<const std::uint8_t> bytes) {
  if (has_prefix(bytes, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) return ImageFormat::Png;
  if (has_prefix(bytes, {0xFF, 0xD8, 0xFF})) return ImageFormat::Jpeg;
  if (has_prefix(bytes, {'B', 'M'})) return ImageFormat::Bmp;
  throw Error(Errc::UnsupportedFormat, "not a PNG, JPEG or BMP stream");
}

// PNG ends with an IEND chunk; libpng silently tolerates some truncations.
bool png_complete(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kIend[] = {'I', 'E', 'N', 'D', 0xAE, 0x42, 0x60, 0x82};
  if (bytes.size() < 12) return false;
  return std::equal(std::begin(kIend), std::end(kIend), bytes.end() - 8);
}

ImageBuffer from_mat(const cv::Mat& decoded) {
  cv::Mat m = decoded;
  if (m.depth() == CV_16U) {
    cv::Mat eight;
    m.convertTo(eight, CV_8U, 1.0 / 257.0);  // saturate_cast rounds to nearest
    m = eight;
  } else if (m.depth() != CV_8U) {
    throw Error(Errc::UnsupportedFormat, "unsupported sample depth");
  }
  cv::Mat rgb;
  switch (m.channels()) {
    case 1: rgb = m; break;
    case 3: cv::cvtColor(m, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(m, rgb, cv::COLOR_BGRA2RGB); break;
    default: throw Error(Errc::UnsupportedFormat, "unsupported channel count");
  }
  if (!rgb.isContinuous()) rgb = rgb.clone();
  ImageBuffer out(rgb.cols, rgb.rows, rgb.channels());
  std::copy(rgb.datastart, rgb.dataend, out.data.begin());
  return out;
}

cv::Mat to_mat(const ImageBuffer& img) {
  cv::Mat view(img.height, img.width, img.channels == 3 ? CV_8UC3 : CV_8UC1,
               const_cast<std::uint8_t*>(img.data.data()));
  cv::Mat bgr;
  if (img.channels == 3)
    cv::cvtColor(view, bgr, cv::COLOR_RGB2BGR);
  else
    bgr = view.clone();
  return bgr;
}

}  // namespace

ImageFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return ImageFormat::Png;
  if (ext == ".jpg" || ext == ".jpeg") return ImageFormat::Jpeg;
  if (ext == ".bmp") return ImageFormat::Bmp;
  throw Error(Errc::UnsupportedFormat, "unrecognized extension '" + ext + "'");
}

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  silence_opencv();
  const ImageFormat fmt = sniff(bytes);
  if (fmt == ImageFormat::Png && !png_complete(bytes)) throw Error(Errc::CorruptImage, "truncated PNG stream");
  cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat decoded;
  try {
    decoded = cv::imdecode(raw, cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  } catch (const cv::Exception& e) {
    throw Error(Errc::CorruptImage, e.what());
  }
  if (decoded.empty()) throw Error(Errc::CorruptImage, "decoder rejected the stream");
  return from_mat(decoded);
}

ImageBuffer load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(Errc::FileNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_image(bytes);
}

std::vector<std::uint8_t> encode_image(const ImageBuffer& img, const SaveOptions& opts) {
  silence_opencv();
  if (img.channels != 1 && img.channels != 3) throw Error(Errc::WrongChannelCount, "expected 1 or 3 channels");
  if (img.data.size() != img.pixel_count() * static_cast<std::size_t>(img.channels))
    throw Error(Errc::DimensionMismatch, "buffer size does not match dimensions");
  std::string ext;
  std::vector<int> params;
  switch (opts.format) {
    case ImageFormat::Png:
      ext = ".png";
      params = {cv::IMWRITE_PNG_COMPRESSION, 6};
      break;
    case ImageFormat::Jpeg:
      if (opts.jpeg_quality < 1 || opts.jpeg_quality > 100)
        throw Error(Errc::UnsupportedFormat, "JPEG quality must be in 1..100, got " + std::to_string(opts.jpeg_quality));
      ext = ".jpg";
      params = {cv::IMWRITE_JPEG_QUALITY, opts.jpeg_quality, cv::IMWRITE_JPEG_OPTIMIZE, 0,
                cv::IMWRITE_JPEG_PROGRESSIVE, 0};
      break;
    case ImageFormat::Bmp:
      throw Error(Errc::UnsupportedFormat, "BMP is an ingest-only format");
  }
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, to_mat(img), out, params)) throw Error(Errc::IoError, "encoder failed");
  return out;
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path, const SaveOptions& opts) {
  const std::vector<std::uint8_t> bytes = encode_image(img, opts);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality) {
  const std::vector<std::uint8_t> bytes = encode_image(img, {ImageFormat::Jpeg, quality});
  return decode_image(bytes);
}

}  // namespace mimicmark
