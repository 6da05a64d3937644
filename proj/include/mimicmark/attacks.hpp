#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "mimicmark/codec.hpp"
#include "mimicmark/image.hpp"
#include "mimicmark/payload.hpp"

namespace mimicmark {

namespace attack {

struct Jpeg { int quality = 75; };
struct GaussianBlur { double sigma = 1.0; int kernel = 5; };
struct Brightness { double factor = 1.2; };
struct Contrast { double factor = 1.2; };
struct Hue { double degrees = 30.0; };
struct CenterCrop { double keep_ratio = 0.95; };  // fraction of the area kept
struct Resize { double scale = 0.5; };
struct Rotation { double degrees = 1.0; };
struct Meme { double band_ratio = 0.12; };
struct Overlay {
  CodecConfig config;
  WatermarkPayload payload;
};

}  // namespace attack

using AttackKind = std::variant<attack::Jpeg, attack::GaussianBlur, attack::Brightness, attack::Contrast, attack::Hue,
                                attack::CenterCrop, attack::Resize, attack::Rotation, attack::Meme, attack::Overlay>;

/// One image-level attack with its parameters.
///
/// Canonical string form is `name:key=value,...`, e.g. `jpeg:q=75`,
/// `gaussian_blur:sigma=1,kernel=5`, `rotation:deg=1`,
/// `overlay:method=dwt-dct,key=<32 hex>,payload=<hex>`. Omitted keys take
/// the declared defaults above; `seed=N` may be appended to any spec.
struct AttackSpec {
  AttackKind kind;
  std::optional<std::uint64_t> seed;

  static AttackSpec parse(std::string_view text);
  std::string to_string() const;
  std::string_view name() const noexcept;
  /// Throws BadParameter when a parameter is outside its range.
  void validate() const;
};

/// The traditional attacks at their declared defaults, in the row order of
/// the robustness table (two-stage fine-tuning is a channel effect, not an
/// image attack).
std::vector<AttackSpec> default_attack_suite();

struct AttackedImage {
  ImageBuffer image;
  AttackSpec applied;
  double psnr_vs_source = 0.0;
};

/// Output always has the source's dimensions and channel count.
AttackedImage apply_attack(const ImageBuffer& img, const AttackSpec& spec);

/// apply_attack, then extract with `config` and score against `payload`.
BitAccuracy attack_then_extract(const ImageBuffer& watermarked, const AttackSpec& spec, const CodecConfig& config,
                                const WatermarkPayload& payload);

// Resampling and filtering kernels shared with the channel surrogate.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma, int kernel);
/// Bilinear resize, pixel centres aligned (x_src = (x + 0.5) * sx - 0.5).
ImageBuffer resize_bilinear(const ImageBuffer& img, int width, int height);

namespace reference {
/// Direct 2-D convolution with the same reflected border and rounding.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma, int kernel);
}  // namespace reference

}  // namespace mimicmark
