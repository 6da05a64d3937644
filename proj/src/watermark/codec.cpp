#include "mimicmark/codec.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "mimicmark/error.hpp"
#include "mimicmark/transforms.hpp"

namespace mimicmark {

std::string_view to_string(Method m) noexcept {
  return m == Method::DwtDct ? "dwt-dct" : "dwt-dct-svd";
}

Method parse_method(std::string_view text) {
  if (text == "dwt-dct" || text == "dwtDct" || text == "dwtdct") return Method::DwtDct;
  if (text == "dwt-dct-svd" || text == "dwtDctSvd" || text == "dwtdctsvd") return Method::DwtDctSvd;
  throw Error(Errc::BadConfig, "unknown method '" + std::string(text) + "' (expected dwt-dct or dwt-dct-svd)");
}

SecretKey SecretKey::from_hex(std::string_view hex) {
  if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  while (!hex.empty() && std::isspace(static_cast<unsigned char>(hex.back()))) hex.remove_suffix(1);
  if (hex.size() != 32) throw Error(Errc::BadConfig, "key must be 32 hex digits (128 bits)");
  SecretKey k;
  for (std::size_t i = 0; i < 16; ++i) {
    int byte = 0;
    for (int h = 0; h < 2; ++h) {
      const int c = std::tolower(static_cast<unsigned char>(hex[2 * i + static_cast<std::size_t>(h)]));
      int v;
      if (c >= '0' && c <= '9')
        v = c - '0';
      else if (c >= 'a' && c <= 'f')
        v = c - 'a' + 10;
      else
        throw Error(Errc::BadConfig, "key contains a non-hex character");
      byte = byte * 16 + v;
    }
    k.bytes[i] = static_cast<std::uint8_t>(byte);
  }
  return k;
}

std::string SecretKey::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

double CodecConfig::effective_strength() const noexcept {
  if (strength) return *strength;
  return method == Method::DwtDct ? kDefaultPnGain : kDefaultQimStep;
}

void CodecConfig::validate() const {
  if (!supported_payload_length(payload_length))
    throw Error(Errc::BadConfig, "payload_length must be 16, 32, 64 or 128");
  if (redundancy < 3 || redundancy % 2 == 0)
    throw Error(Errc::BadConfig, "redundancy must be odd and >= 3, got " + std::to_string(redundancy));
  const double s = effective_strength();
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(Errc::BadConfig, "strength must be a positive finite number");
}

CodecGeometry codec_geometry(Method method, int width, int height) noexcept {
  const int bs = method == Method::DwtDct ? 4 : 8;
  return {bs, block_capacity(width / 2, height / 2, bs)};
}

namespace detail {
std::unique_ptr<Codec> make_dwt_dct_codec();
std::unique_ptr<Codec> make_dwt_dct_svd_codec();
}  // namespace detail

const Codec& codec_for(Method method) {
  static const std::unique_ptr<Codec> dct = detail::make_dwt_dct_codec();
  static const std::unique_ptr<Codec> svd = detail::make_dwt_dct_svd_codec();
  return method == Method::DwtDct ? *dct : *svd;
}

EmbedResult embed(const ImageBuffer& img, const WatermarkPayload& payload, const CodecConfig& config) {
  return codec_for(config.method).embed(img, payload, config);
}

ExtractionResult extract(const ImageBuffer& img, const CodecConfig& config) {
  return codec_for(config.method).extract(img, config);
}

}  // namespace mimicmark
