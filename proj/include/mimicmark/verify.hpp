#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimicmark/channel.hpp"
#include "mimicmark/codec.hpp"
#include "mimicmark/image.hpp"
#include "mimicmark/payload.hpp"
#include "mimicmark/record.hpp"

namespace mimicmark {

enum class Binning { Five, Ten };
int bin_count(Binning b) noexcept;
Binning parse_binning(std::string_view text);

/// Counts per accuracy bin (20% or 10% wide, left-closed, last closed).
/// Throws EmptySampleSet.
std::vector<std::int64_t> histogram(const AccuracySampleSet& samples, Binning binning);

struct SampleSummary {
  double avg_bits = 0.0;
  int best_bits = 0;
};
SampleSummary summary(const AccuracySampleSet& samples);

inline constexpr double kDefaultAlpha = 1e-4;
inline constexpr double kDefaultRho = 0.05;
inline constexpr int kMinReferenceSamples = 100;

/// What per-image correct-bit counts look like when nothing was stolen:
/// BetaBinomial(n_bits) with mean accuracy p0 and intra-image correlation
/// rho (rho = 0 is the plain binomial).
struct NullModel {
  enum class Kind { TheoreticalChance, EmpiricalReference };
  Kind kind = Kind::TheoreticalChance;
  int n_bits = 32;
  double p0 = 0.5;
  double rho = kDefaultRho;
  std::optional<AccuracySampleSet> reference_samples;

  static NullModel chance(int n_bits, double rho = kDefaultRho);
  /// p0 and rho by method of moments. Throws TooFewSamples below
  /// kMinReferenceSamples.
  static NullModel from_reference(AccuracySampleSet reference);

  std::vector<double> pmf() const;
  /// Throws BadParameter.
  void validate() const;
};
std::string_view to_string(NullModel::Kind k) noexcept;

enum class Decision { TheftDetected, NoEvidence };
std::string_view to_string(Decision d) noexcept;

struct VerificationVerdict {
  double avg_bits = 0.0;
  int best_bits = 0;
  std::vector<std::int64_t> histogram_5bin;
  std::vector<std::int64_t> histogram_10bin;
  double p_mean = 1.0;  // 1 when fewer than kMinMeanTestSamples samples
  double p_max = 1.0;
  std::optional<double> p_ks;
  Decision decision = Decision::NoEvidence;
  double alpha_used = kDefaultAlpha;
  std::int64_t sample_count = 0;
  int n_bits = 32;
};

inline constexpr int kMinMeanTestSamples = 10;
inline constexpr int kExactMeanTestBelow = 30;

/// Mean test (one-sided, overdispersion-corrected normal approximation;
/// exact convolution of the null for fewer than kExactMeanTestBelow
/// samples), max test (exact tail of the largest of N null draws), and a
/// two-sample KS test when the null carries reference samples.
/// Throws TooFewSamples (empty set), NullMismatch.
VerificationVerdict detect(const AccuracySampleSet& samples, const NullModel& null, double alpha = kDefaultAlpha);

/// One-sided p-values used by detect, exposed for testing.
double mean_test_p_value(std::span<const int> samples, const NullModel& null);
double max_test_p_value(int best_bits, std::int64_t sample_count, const NullModel& null);

/// Correct bits per image for `payload` under `config`. Images are
/// processed in parallel; the first failure is rethrown.
AccuracySampleSet extract_accuracies(std::span<const ImageBuffer> images, const CodecConfig& config,
                                     const WatermarkPayload& payload);

/// extract_accuracies followed by detect. Throws TooFewSamples below
/// kMinMeanTestSamples images.
VerificationVerdict extract_and_detect(std::span<const ImageBuffer> images, const CodecConfig& config,
                                       const WatermarkPayload& payload, const NullModel& null,
                                       double alpha = kDefaultAlpha);

enum class Ruling { Authorized, Unauthorized, Indeterminate };
std::string_view to_string(Ruling r) noexcept;

inline constexpr double kDefaultMatchThreshold = 0.75;

struct AuthorizationMatch {
  BitAccuracy acc_vs_authorized;
  BitAccuracy acc_vs_unauthorized;
  Ruling ruling = Ruling::Indeterminate;
};

/// Which registered payload an extraction agrees with. When both clear the
/// threshold the closer one wins; an exact tie is indeterminate.
/// Throws IdenticalPayloads, LengthMismatch.
AuthorizationMatch match_authorization(const BitVector& extracted, const WatermarkPayload& authorized,
                                       const WatermarkPayload& unauthorized,
                                       double threshold = kDefaultMatchThreshold);

struct ArtistOutcome {
  std::string artist_id;
  std::optional<VerificationVerdict> verdict;
  std::string error;  // set when the record could not be evaluated
  bool flagged() const noexcept { return verdict && verdict->decision == Decision::TheftDetected; }
};

/// Independent extract_and_detect per record over the shared images, keyed
/// by record_id. With `group_labels` (one per image), each record only sees
/// the images labelled with its artist_id. A failing record is reported in
/// its outcome and does not stop the others.
std::map<std::string, ArtistOutcome> multi_artist_verify(std::span<const ImageBuffer> images,
                                                         std::span<const RegistryRecord> records,
                                                         const NullModel& null, double alpha = kDefaultAlpha,
                                                         std::span<const std::string> group_labels = {});

/// Detection rate of detect() on samples drawn from `model`, per N.
struct PowerPoint {
  int sample_count;
  int trials;
  double detection_rate;
};
std::vector<PowerPoint> power_curve(const ChannelModel& model, const NullModel& null, double alpha,
                                    std::span<const int> sample_counts, int trials, std::uint64_t seed);

}  // namespace mimicmark
