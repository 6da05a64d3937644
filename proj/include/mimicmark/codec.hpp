#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimicmark/image.hpp"
#include "mimicmark/payload.hpp"

namespace mimicmark {

enum class Method { DwtDct, DwtDctSvd };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);

/// 128-bit codec secret.
struct SecretKey {
  std::array<std::uint8_t, 16> bytes{};

  static SecretKey from_hex(std::string_view hex);
  std::string to_hex() const;
  bool operator==(const SecretKey&) const = default;
};

/// Default embedding strengths. For dwt-dct this is the PN gain in
/// orthonormal coefficient units; for dwt-dct-svd the QIM step on the
/// largest singular value.
inline constexpr double kDefaultPnGain = 6.0;
inline constexpr double kDefaultQimStep = 192.0;
inline constexpr int kDefaultRedundancy = 5;

struct CodecConfig {
  Method method = Method::DwtDctSvd;
  SecretKey key;
  std::optional<double> strength;  // unset: method default
  int payload_length = 32;
  int redundancy = kDefaultRedundancy;  // blocks per bit, odd, >= 3

  double effective_strength() const noexcept;
  /// Throws BadConfig when an invariant is violated.
  void validate() const;
};

/// Sub-band layout used by each method.
struct CodecGeometry {
  int block_size;
  int usable_blocks;
};
CodecGeometry codec_geometry(Method method, int width, int height) noexcept;

struct ExtractionResult {
  BitVector bits;
  std::vector<double> confidences;  // in [0, 1]
  Method method = Method::DwtDctSvd;
  int payload_length = 0;
};

struct EmbedStats {
  double psnr = 0.0;
  int blocks_used = 0;
  int refinement_passes = 0;
};

struct EmbedResult {
  ImageBuffer watermarked;
  EmbedStats stats;
};

/// Blind multi-bit codec. Extraction takes only the suspect image and the
/// configuration; there is deliberately no original-image parameter.
class Codec {
 public:
  virtual ~Codec() = default;
  virtual Method method() const noexcept = 0;
  virtual EmbedResult embed(const ImageBuffer& img, const WatermarkPayload& payload,
                            const CodecConfig& config) const = 0;
  virtual ExtractionResult extract(const ImageBuffer& img, const CodecConfig& config) const = 0;
};

const Codec& codec_for(Method method);

EmbedResult embed(const ImageBuffer& img, const WatermarkPayload& payload, const CodecConfig& config);
ExtractionResult extract(const ImageBuffer& img, const CodecConfig& config);

/// Keyed block selection and PN sequences for one (key, image shape, method).
struct KeyStreams {
  std::vector<int> block_order;   // permutation of all usable block indices
  std::array<int, 8> pn0{};       // +-1
  std::array<int, 8> pn1{};       // +-1, orthogonal to pn0
};

KeyStreams derive_streams(const SecretKey& key, int width, int height, const CodecConfig& config);

/// Zig-zag positions 3..10 of a 4x4 tile as row-major indices.
inline constexpr std::array<int, 8> kMidBand4x4 = {8, 5, 2, 3, 6, 9, 12, 13};

}  // namespace mimicmark
