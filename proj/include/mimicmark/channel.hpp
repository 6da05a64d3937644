#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimicmark/image.hpp"

namespace mimicmark {

enum class Provenance { PaperTable, Fitted, User };
std::string_view to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

/// Distribution of the number of correctly extracted bits per generated
/// image.
///
/// `alpha`/`beta` always hold a beta-binomial with the model's mean and
/// (moment-matched) spread. Models calibrated to a table row additionally
/// carry `table_pmf`, a tabulated law over K = 0..n_bits that reproduces
/// the row's bin masses and mean exactly; when present it is what gets
/// sampled.
struct ChannelModel {
  int n_bits = 32;
  double alpha = 1.0;
  double beta = 1.0;
  std::string label;
  Provenance provenance = Provenance::User;
  std::vector<double> table_pmf;

  static ChannelModel beta_binomial(int n_bits, double alpha, double beta, std::string label = {},
                                    Provenance provenance = Provenance::User);

  std::vector<double> pmf() const;
  double mean_bits() const;
  double mean_accuracy() const { return mean_bits() / n_bits; }
  /// Intra-class correlation of the beta-binomial summary, 1/(alpha+beta+1).
  double overdispersion() const { return 1.0 / (alpha + beta + 1.0); }
  /// Throws BadParameter.
  void validate() const;
};

/// Content prompt and special tag used to generate a group of samples.
/// Carried as metadata only.
struct PromptSpec {
  std::string content_prompt;
  std::string special_tag;
  std::string group_label;
};

struct AccuracySampleSet {
  std::vector<int> samples;  // correct bits per image, each in [0, n_bits]
  int n_bits = 32;
  std::vector<std::string> groups;  // empty, or one label per sample
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return samples.size(); }
  /// Throws BadParameter if a count is out of range or labels mismatch.
  void validate() const;
};

// ---- preset catalog ----

struct PresetInfo {
  std::string id;
  std::string family;  // "binned" or "beta-binomial"
  std::string source;
  std::string row;
  int n_bits = 32;
  std::vector<std::int64_t> bins;  // table counts, binned family only
  double avg = 0.0;
  int best = 0;
  ChannelModel model;
};

/// Every shipped preset, in catalog order.
const std::vector<PresetInfo>& preset_catalog();
const PresetInfo& preset_info(std::string_view name);
/// Throws UnknownPreset.
ChannelModel preset(std::string_view name);

/// Tabulated model over K = 0..n_bits whose mass in each equal-width
/// accuracy bin is `bin_counts` normalized and whose mean is `mean_bits`.
/// Within a bin the law is the maximum-entropy one, p(K) ~ exp(theta*K),
/// with a single theta shared by all bins. If `mean_bits` is outside what
/// the bin masses allow, theta is clamped and the nearest feasible mean is
/// used.
ChannelModel calibrate_to_bins(std::span<const std::int64_t> bin_counts, int n_bits, double mean_bits,
                               std::string label = {}, Provenance provenance = Provenance::Fitted);

/// Beta-binomial fit to a histogram over equal-width accuracy bins: moment
/// matching on the bin midpoints, then a grid search on (mean, rho)
/// minimizing the chi-square distance between model bin mass and the
/// observed proportions. Passing `mean_bits` pins the mean and fits only the
/// spread. Throws DegenerateHistogram.
ChannelModel fit_channel(std::span<const std::int64_t> histogram, int n_bits,
                         std::optional<double> mean_bits = std::nullopt);

AccuracySampleSet sample_accuracies(const ChannelModel& model, int count, std::uint64_t seed);

// ---- mixtures and secondary fine-tuning ----

struct ChannelMixture {
  ChannelModel watermarked;
  ChannelModel clean;
  double p_watermarked = 0.0;
  double weight = 0.0;  // q(p): probability a draw comes from `watermarked`

  std::vector<double> pmf() const;
  double mean_bits() const;
};

using MixingCurve = double (*)(double);
inline double identity_mixing(double p) { return p; }

/// Throws BitLengthMismatch, BadParameter (p outside [0,1] or q not in
/// [0,1] / not anchored at the endpoints).
ChannelMixture mix(const ChannelModel& watermarked, const ChannelModel& clean, double p_watermarked,
                   MixingCurve q = identity_mixing);

/// Draws are labelled "watermarked" / "clean" in `groups`.
AccuracySampleSet sample_accuracies(const ChannelMixture& mixture, int count, std::uint64_t seed);

/// Mean ratio of a second fine-tuning round on top of the first.
inline constexpr double kTwoStageMeanRatio = 19.02 / 19.96;

/// Degraded model after a second fine-tuning round: mean multiplied by
/// kTwoStageMeanRatio, spread refit to the two-stage bin profile. When that
/// profile cannot reach the target mean the input's overdispersion is kept
/// on a beta-binomial instead.
ChannelModel two_stage(const ChannelModel& model);

// ---- image-level surrogate ----

enum class Severity { Mild, Standard, Harsh };
std::string_view to_string(Severity s) noexcept;
Severity parse_severity(std::string_view text);

struct DegradeProfile {
  double scale;           // down/up-scale factor
  double noise_sigma;     // per-pixel Gaussian noise, grey levels
  double drift_sigma;     // smooth (low-frequency) Gaussian field, grey levels
  int drift_cell;         // correlation length of the smooth field, pixels
  int jpeg_quality;
  double jitter;          // per-channel gain drawn from [1-j, 1+j]
};
DegradeProfile degrade_profile(Severity s) noexcept;

/// Stand-in for generation by a mimicry model: down/up-scale, additive
/// Gaussian noise (white plus a smooth field), JPEG, colour jitter.
/// Deterministic under `seed`.
ImageBuffer surrogate_degrade(const ImageBuffer& img, Severity severity, std::uint64_t seed);

}  // namespace mimicmark
