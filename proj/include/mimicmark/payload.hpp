#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mimicmark {

enum class PayloadRole { Authorized, Unauthorized };

std::string_view to_string(PayloadRole role) noexcept;
PayloadRole parse_payload_role(std::string_view text);

/// Payload capacities the codecs support.
inline constexpr int kPayloadLengths[] = {16, 32, 64, 128};
bool supported_payload_length(int bits) noexcept;

using BitVector = std::vector<std::uint8_t>;  // one 0/1 entry per bit

/// The artist's n-bit message.
class WatermarkPayload {
 public:
  WatermarkPayload() = default;
  explicit WatermarkPayload(BitVector bits, PayloadRole role = PayloadRole::Unauthorized);

  /// Hex digits, MSB first; "0x" prefix optional. 4 bits per digit.
  static WatermarkPayload from_hex(std::string_view hex, PayloadRole role = PayloadRole::Unauthorized);
  /// '0'/'1' characters; "0b" prefix optional.
  static WatermarkPayload from_bitstring(std::string_view bits, PayloadRole role = PayloadRole::Unauthorized);
  /// "0b..." selects a bit string, anything else is read as hex.
  static WatermarkPayload parse(std::string_view text, PayloadRole role = PayloadRole::Unauthorized);

  const BitVector& bits() const noexcept { return bits_; }
  int length() const noexcept { return static_cast<int>(bits_.size()); }
  PayloadRole role() const noexcept { return role_; }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }

  std::string to_hex() const;
  std::string to_bitstring() const;

  bool operator==(const WatermarkPayload&) const = default;

 private:
  BitVector bits_;
  PayloadRole role_ = PayloadRole::Unauthorized;
};

struct BitAccuracy {
  int correct_bits = 0;
  int total_bits = 0;
  double acc = 0.0;
};

/// Hamming agreement between an extracted bit vector and a reference payload.
BitAccuracy bit_accuracy(const BitVector& extracted, const WatermarkPayload& reference);
BitAccuracy bit_accuracy(const BitVector& extracted, const BitVector& reference);

}  // namespace mimicmark
