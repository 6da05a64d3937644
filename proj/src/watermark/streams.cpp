#include <sodium.h>

#include <cstring>
#include <numeric>
#include <string>

#include "mimicmark/codec.hpp"
#include "mimicmark/error.hpp"

namespace mimicmark {
namespace {

// ChaCha20 keystream consumed as little-endian 32-bit words.
class KeyedStream {
 public:
  explicit KeyedStream(const unsigned char (&seed)[crypto_stream_chacha20_KEYBYTES]) {
    std::memcpy(seed_, seed, sizeof seed_);
  }

  std::uint32_t next() {
    if (pos_ == buffer_.size()) refill();
    const std::uint32_t v = static_cast<std::uint32_t>(buffer_[pos_]) | static_cast<std::uint32_t>(buffer_[pos_ + 1]) << 8 |
                            static_cast<std::uint32_t>(buffer_[pos_ + 2]) << 16 |
                            static_cast<std::uint32_t>(buffer_[pos_ + 3]) << 24;
    pos_ += 4;
    return v;
  }

  // Uniform in [0, bound) by rejection.
  std::uint32_t below(std::uint32_t bound) {
    const std::uint32_t limit = static_cast<std::uint32_t>((0x100000000ULL / bound) * bound);
    for (;;) {
      const std::uint64_t v = next();
      if (limit == 0 || v < limit) return static_cast<std::uint32_t>(v % bound);
    }
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint32_t>(last - first);
    for (std::uint32_t i = n; i > 1; --i) std::swap(first[i - 1], first[below(i)]);
  }

 private:
  void refill() {
    unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<unsigned char>(block_ >> (8 * i));
    ++block_;
    crypto_stream_chacha20(buffer_.data(), buffer_.size(), nonce, seed_);
    pos_ = 0;
  }

  unsigned char seed_[crypto_stream_chacha20_KEYBYTES];
  std::array<unsigned char, 1024> buffer_{};
  std::size_t pos_ = buffer_.size();
  std::uint64_t block_ = 0;
};

}  // namespace

KeyStreams derive_streams(const SecretKey& key, int width, int height, const CodecConfig& config) {
  if (sodium_init() < 0) throw Error(Errc::IoError, "libsodium failed to initialize");
  const CodecGeometry geo = codec_geometry(config.method, width, height);

  // Domain-separated keyed BLAKE2b of the stream context.
  const std::string context = "mimicmark-streams-v1|" + std::string(to_string(config.method)) + "|" +
                              std::to_string(width) + "x" + std::to_string(height);
  unsigned char seed[crypto_stream_chacha20_KEYBYTES];
  static_assert(sizeof(key.bytes) >= crypto_generichash_KEYBYTES_MIN);
  crypto_generichash(seed, sizeof seed, reinterpret_cast<const unsigned char*>(context.data()), context.size(),
                     key.bytes.data(), key.bytes.size());
  KeyedStream stream(seed);

  KeyStreams out;
  out.block_order.resize(static_cast<std::size_t>(std::max(geo.usable_blocks, 0)));
  std::iota(out.block_order.begin(), out.block_order.end(), 0);
  stream.shuffle(out.block_order.begin(), out.block_order.end());

  // pn0 is balanced; pn1 = pn0 * h where h is balanced on both halves of
  // pn0, so pn0, pn1 and the all-ones vector are mutually orthogonal.
  std::array<int, 8> base = {1, 1, 1, 1, -1, -1, -1, -1};
  stream.shuffle(base.begin(), base.end());
  out.pn0 = base;
  std::array<int, 4> flip_pos = {1, 1, -1, -1}, flip_neg = {1, 1, -1, -1};
  stream.shuffle(flip_pos.begin(), flip_pos.end());
  stream.shuffle(flip_neg.begin(), flip_neg.end());
  int ip = 0, in = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    const int h = out.pn0[i] > 0 ? flip_pos[static_cast<std::size_t>(ip++)] : flip_neg[static_cast<std::size_t>(in++)];
    out.pn1[i] = out.pn0[i] * h;
  }
  return out;
}

}  // namespace mimicmark
