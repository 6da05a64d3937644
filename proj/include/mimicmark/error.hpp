#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mimicmark {

enum class Errc {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  IoError,
  WrongChannelCount,
  DimensionMismatch,
  EmptyPlane,
  BadBlockSize,
  NonFiniteInput,
  TooSmall,
  CapacityExceeded,
  GrayscaleRequiresDwtDct,
  LengthMismatch,
  BadPayload,
  BadConfig,
  BadParameter,
  OverlayCapacityExceeded,
  UnknownPreset,
  DegenerateHistogram,
  BitLengthMismatch,
  EmptySampleSet,
  TooFewSamples,
  NullMismatch,
  IdenticalPayloads,
  DuplicateRecord,
  NotFound,
  CorruptRecord,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-status mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mimicmark
