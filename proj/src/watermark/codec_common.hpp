#pragma once

#include <string>

#include "mimicmark/codec.hpp"
#include "mimicmark/error.hpp"

namespace mimicmark::detail {

/// Shared precondition checks for embed/extract. Returns the block layout.
inline CodecGeometry check_embed_inputs(const ImageBuffer& img, const WatermarkPayload* payload,
                                        const CodecConfig& config) {
  require_watermarkable(img);
  config.validate();
  if (payload && payload->length() != config.payload_length)
    throw Error(Errc::LengthMismatch, "payload has " + std::to_string(payload->length()) +
                                          " bits but config expects " + std::to_string(config.payload_length));
  const CodecGeometry geo = codec_geometry(config.method, img.width, img.height);
  const long needed = static_cast<long>(config.payload_length) * config.redundancy;
  if (needed > geo.usable_blocks)
    throw Error(Errc::CapacityExceeded, std::to_string(config.payload_length) + " bits x " +
                                            std::to_string(config.redundancy) + " blocks needs " +
                                            std::to_string(needed) + " blocks; image offers " +
                                            std::to_string(geo.usable_blocks));
  return geo;
}

/// Block index carrying copy `copy` of bit `bit`.
inline int assigned_block(const KeyStreams& streams, const CodecConfig& config, int bit, int copy) {
  return streams.block_order[static_cast<std::size_t>(bit * config.redundancy + copy)];
}

/// Majority vote over per-block votes; confidence passed through.
struct VoteTally {
  int ones = 0;
  int zeros = 0;
  double signed_margin = 0.0;  // + favours 1
};

}  // namespace mimicmark::detail
