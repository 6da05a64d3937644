#include "mimicmark/payload.hpp"

#include <cctype>

#include "mimicmark/error.hpp"

namespace mimicmark {
namespace {

std::string_view strip_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() >= prefix.size()) {
    bool match = true;
    for (std::size_t i = 0; i < prefix.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) match = false;
    if (match) text.remove_prefix(prefix.size());
  }
  return text;
}

void check_length(std::size_t n) {
  if (!supported_payload_length(static_cast<int>(n)))
    throw Error(Errc::BadPayload, "payload must be 16, 32, 64 or 128 bits, got " + std::to_string(n));
}

}  // namespace

std::string_view to_string(PayloadRole role) noexcept {
  return role == PayloadRole::Authorized ? "authorized" : "unauthorized";
}

PayloadRole parse_payload_role(std::string_view text) {
  if (text == "authorized") return PayloadRole::Authorized;
  if (text == "unauthorized") return PayloadRole::Unauthorized;
  throw Error(Errc::BadParameter, "role must be 'authorized' or 'unauthorized'");
}

bool supported_payload_length(int bits) noexcept {
  for (int n : kPayloadLengths)
    if (n == bits) return true;
  return false;
}

WatermarkPayload::WatermarkPayload(BitVector bits, PayloadRole role) : bits_(std::move(bits)), role_(role) {
  check_length(bits_.size());
  for (auto b : bits_)
    if (b > 1) throw Error(Errc::BadPayload, "bit vector entries must be 0 or 1");
}

WatermarkPayload WatermarkPayload::from_hex(std::string_view hex, PayloadRole role) {
  hex = strip_prefix(hex, "0x");
  BitVector bits;
  bits.reserve(hex.size() * 4);
  for (char ch : hex) {
    const int c = std::tolower(static_cast<unsigned char>(ch));
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else
      throw Error(Errc::BadPayload, std::string("invalid hex digit '") + ch + "'");
    for (int s = 3; s >= 0; --s) bits.push_back(static_cast<std::uint8_t>((v >> s) & 1));
  }
  return WatermarkPayload(std::move(bits), role);
}

WatermarkPayload WatermarkPayload::from_bitstring(std::string_view text, PayloadRole role) {
  text = strip_prefix(text, "0b");
  BitVector bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw Error(Errc::BadPayload, std::string("invalid bit character '") + ch + "'");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return WatermarkPayload(std::move(bits), role);
}

WatermarkPayload WatermarkPayload::parse(std::string_view text, PayloadRole role) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) return from_bitstring(text, role);
  return from_hex(text, role);
}

std::string WatermarkPayload::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i + 3 < bits_.size(); i += 4)
    out.push_back(kDigits[(bits_[i] << 3) | (bits_[i + 1] << 2) | (bits_[i + 2] << 1) | bits_[i + 3]]);
  return out;
}

std::string WatermarkPayload::to_bitstring() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(static_cast<char>('0' + b));
  return out;
}

BitAccuracy bit_accuracy(const BitVector& extracted, const BitVector& reference) {
  if (extracted.size() != reference.size())
    throw Error(Errc::LengthMismatch, "extracted " + std::to_string(extracted.size()) + " bits vs reference " +
                                          std::to_string(reference.size()));
  BitAccuracy r;
  r.total_bits = static_cast<int>(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i)
    if ((extracted[i] != 0) == (reference[i] != 0)) ++r.correct_bits;
  r.acc = r.total_bits == 0 ? 0.0 : static_cast<double>(r.correct_bits) / r.total_bits;
  return r;
}

BitAccuracy bit_accuracy(const BitVector& extracted, const WatermarkPayload& reference) {
  return bit_accuracy(extracted, reference.bits());
}

}  // namespace mimicmark
