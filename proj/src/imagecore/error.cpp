#include "mimicmark/error.hpp"

namespace mimicmark {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptImage: return "CorruptImage";
    case Errc::IoError: return "IoError";
    case Errc::WrongChannelCount: return "WrongChannelCount";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyPlane: return "EmptyPlane";
    case Errc::BadBlockSize: return "BadBlockSize";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::TooSmall: return "TooSmall";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::GrayscaleRequiresDwtDct: return "GrayscaleRequiresDwtDct";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::BadPayload: return "BadPayload";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadParameter: return "BadParameter";
    case Errc::OverlayCapacityExceeded: return "OverlayCapacityExceeded";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::DegenerateHistogram: return "DegenerateHistogram";
    case Errc::BitLengthMismatch: return "BitLengthMismatch";
    case Errc::EmptySampleSet: return "EmptySampleSet";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::NullMismatch: return "NullMismatch";
    case Errc::IdenticalPayloads: return "IdenticalPayloads";
    case Errc::DuplicateRecord: return "DuplicateRecord";
    case Errc::NotFound: return "NotFound";
    case Errc::CorruptRecord: return "CorruptRecord";
  }
  return "Unknown";
}

}  // namespace mimicmark
