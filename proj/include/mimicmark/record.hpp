#pragma once

#include <optional>
#include <string>

#include "mimicmark/codec.hpp"
#include "mimicmark/payload.hpp"

namespace mimicmark {

/// One registered watermark of one artist. `codec.key` is always the
/// resolved key in memory; on disk it is stored as `key_file` unless the
/// record was registered with an inline key.
struct RegistryRecord {
  std::string record_id;
  std::string artist_id;
  WatermarkPayload payload;
  CodecConfig codec;
  std::optional<std::string> key_file;
  std::string created_at;  // ISO-8601 UTC
  std::string notes;
  std::optional<std::string> signature;  // reserved, never interpreted

  PayloadRole role() const noexcept { return payload.role(); }
};

}  // namespace mimicmark
