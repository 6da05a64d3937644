#include "mimicmark/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "mimicmark/error.hpp"
#include "mimicmark/rng.hpp"
#include "mimicmark/stats.hpp"

namespace mimicmark {

int bin_count(Binning b) noexcept { return b == Binning::Five ? 5 : 10; }

Binning parse_binning(std::string_view text) {
  if (text == "five" || text == "5") return Binning::Five;
  if (text == "ten" || text == "10") return Binning::Ten;
  throw Error(Errc::BadParameter, "binning must be 'five' or 'ten'");
}

std::vector<std::int64_t> histogram(const AccuracySampleSet& samples, Binning binning) {
  if (samples.samples.empty()) throw Error(Errc::EmptySampleSet, "no samples to bin");
  samples.validate();
  const int nb = bin_count(binning);
  std::vector<std::int64_t> out(static_cast<std::size_t>(nb), 0);
  for (int k : samples.samples) ++out[static_cast<std::size_t>(stats::accuracy_bin(k, samples.n_bits, nb))];
  return out;
}

SampleSummary summary(const AccuracySampleSet& samples) {
  if (samples.samples.empty()) throw Error(Errc::EmptySampleSet, "no samples to summarize");
  const std::int64_t total = std::accumulate(samples.samples.begin(), samples.samples.end(), std::int64_t{0});
  return {static_cast<double>(total) / static_cast<double>(samples.size()),
          *std::max_element(samples.samples.begin(), samples.samples.end())};
}

// ---- null model ----

NullModel NullModel::chance(int n_bits, double rho) {
  NullModel m;
  m.n_bits = n_bits;
  m.rho = rho;
  m.validate();
  return m;
}

NullModel NullModel::from_reference(AccuracySampleSet reference) {
  reference.validate();
  if (static_cast<int>(reference.size()) < kMinReferenceSamples)
    throw Error(Errc::TooFewSamples, "empirical null needs at least " + std::to_string(kMinReferenceSamples) +
                                         " reference samples, got " + std::to_string(reference.size()));
  const double n = static_cast<double>(reference.size());
  double mean = 0.0, var = 0.0;
  for (int k : reference.samples) mean += k;
  mean /= n;
  for (int k : reference.samples) var += (k - mean) * (k - mean);
  var /= n - 1.0;
  NullModel m;
  m.kind = Kind::EmpiricalReference;
  m.n_bits = reference.n_bits;
  m.p0 = std::clamp(mean / reference.n_bits, 1e-6, 1.0 - 1e-6);
  m.rho = stats::overdispersion(mean, var, reference.n_bits);
  m.reference_samples = std::move(reference);
  m.validate();
  return m;
}

std::vector<double> NullModel::pmf() const {
  if (rho > 0.0) {
    const stats::BetaShape s = stats::shape_from_moments(p0, rho);
    return stats::beta_binomial_pmf(n_bits, s.alpha, s.beta);
  }
  std::vector<double> out(static_cast<std::size_t>(n_bits + 1));
  for (int k = 0; k <= n_bits; ++k)
    out[static_cast<std::size_t>(k)] = std::exp(std::lgamma(n_bits + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_bits - k + 1.0) +
                                                k * std::log(p0) + (n_bits - k) * std::log1p(-p0));
  return out;
}

void NullModel::validate() const {
  if (n_bits < 1) throw Error(Errc::BadParameter, "null n_bits must be positive");
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(Errc::BadParameter, "null p0 must be in (0, 1)");
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(Errc::BadParameter, "null rho must be in [0, 1)");
  if (kind == Kind::EmpiricalReference &&
      (!reference_samples || static_cast<int>(reference_samples->size()) < kMinReferenceSamples))
    throw Error(Errc::TooFewSamples, "empirical null without enough reference samples");
}

std::string_view to_string(NullModel::Kind k) noexcept {
  return k == NullModel::Kind::TheoreticalChance ? "theoretical-chance" : "empirical-reference";
}

std::string_view to_string(Decision d) noexcept { return d == Decision::TheftDetected ? "theft-detected" : "no-evidence"; }

// ---- tests ----

double mean_test_p_value(std::span<const int> samples, const NullModel& null) {
  const auto count = static_cast<std::int64_t>(samples.size());
  if (count < kMinMeanTestSamples) return 1.0;
  const std::int64_t sum = std::accumulate(samples.begin(), samples.end(), std::int64_t{0});
  const int n = null.n_bits;
  if (count < kExactMeanTestBelow) {
    // Exact law of the sum of `count` null draws.
    const std::vector<double> one = null.pmf();
    std::vector<double> dist{1.0};
    for (std::int64_t i = 0; i < count; ++i) {
      std::vector<double> next(dist.size() + static_cast<std::size_t>(n), 0.0);
      for (std::size_t s = 0; s < dist.size(); ++s)
        for (int k = 0; k <= n; ++k) next[s + static_cast<std::size_t>(k)] += dist[s] * one[static_cast<std::size_t>(k)];
      dist = std::move(next);
    }
    double tail = 0.0;
    for (std::size_t s = static_cast<std::size_t>(sum); s < dist.size(); ++s) tail += dist[s];
    return std::clamp(tail, 0.0, 1.0);
  }
  const double mean_acc = static_cast<double>(sum) / static_cast<double>(count * n);
  const double var = null.p0 * (1.0 - null.p0) * (1.0 + (n - 1) * null.rho) / (static_cast<double>(count) * n);
  return stats::normal_sf((mean_acc - null.p0) / std::sqrt(var));
}

double max_test_p_value(int best_bits, std::int64_t sample_count, const NullModel& null) {
  if (sample_count < 1) throw Error(Errc::TooFewSamples, "max test needs at least one sample");
  const std::vector<double> pmf = null.pmf();
  double tail = 0.0;  // P(K >= best) for one draw
  for (int k = std::max(best_bits, 0); k <= null.n_bits; ++k) tail += pmf[static_cast<std::size_t>(k)];
  if (tail >= 1.0) return 1.0;
  // 1 - (1 - tail)^N without cancellation.
  return std::clamp(-std::expm1(static_cast<double>(sample_count) * std::log1p(-tail)), 0.0, 1.0);
}

VerificationVerdict detect(const AccuracySampleSet& samples, const NullModel& null, double alpha) {
  if (samples.samples.empty()) throw Error(Errc::TooFewSamples, "detect needs at least one sample");
  if (samples.n_bits != null.n_bits)
    throw Error(Errc::NullMismatch, "samples have " + std::to_string(samples.n_bits) + " bits, null has " +
                                        std::to_string(null.n_bits));
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::BadParameter, "alpha must be in (0, 1)");
  null.validate();
  samples.validate();

  VerificationVerdict v;
  const SampleSummary s = summary(samples);
  v.avg_bits = s.avg_bits;
  v.best_bits = s.best_bits;
  v.histogram_5bin = histogram(samples, Binning::Five);
  v.histogram_10bin = histogram(samples, Binning::Ten);
  v.sample_count = static_cast<std::int64_t>(samples.size());
  v.n_bits = samples.n_bits;
  v.alpha_used = alpha;
  v.p_mean = mean_test_p_value(samples.samples, null);
  v.p_max = max_test_p_value(s.best_bits, v.sample_count, null);
  if (null.reference_samples) v.p_ks = stats::ks_two_sample(samples.samples, null.reference_samples->samples).p_value;
  v.decision = std::min(v.p_mean, v.p_max) < alpha ? Decision::TheftDetected : Decision::NoEvidence;
  return v;
}

// ---- extraction-driven verification ----

AccuracySampleSet extract_accuracies(std::span<const ImageBuffer> images, const CodecConfig& config,
                                     const WatermarkPayload& payload) {
  config.validate();
  if (payload.length() != config.payload_length)
    throw Error(Errc::LengthMismatch, "payload length differs from codec payload_length");
  AccuracySampleSet out;
  out.n_bits = payload.length();
  out.samples.assign(images.size(), 0);
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(images.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      const ExtractionResult r = extract(images[static_cast<std::size_t>(i)], config);
      out.samples[static_cast<std::size_t>(i)] = bit_accuracy(r.bits, payload).correct_bits;
    } catch (...) {
#pragma omp critical(mimicmark_extract_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

VerificationVerdict extract_and_detect(std::span<const ImageBuffer> images, const CodecConfig& config,
                                       const WatermarkPayload& payload, const NullModel& null, double alpha) {
  if (static_cast<int>(images.size()) < kMinMeanTestSamples)
    throw Error(Errc::TooFewSamples, "need at least " + std::to_string(kMinMeanTestSamples) + " images, got " +
                                         std::to_string(images.size()));
  return detect(extract_accuracies(images, config, payload), null, alpha);
}

std::string_view to_string(Ruling r) noexcept {
  switch (r) {
    case Ruling::Authorized: return "authorized";
    case Ruling::Unauthorized: return "unauthorized";
    case Ruling::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

AuthorizationMatch match_authorization(const BitVector& extracted, const WatermarkPayload& authorized,
                                       const WatermarkPayload& unauthorized, double threshold) {
  if (authorized.bits() == unauthorized.bits())
    throw Error(Errc::IdenticalPayloads, "authorized and unauthorized payloads are identical");
  AuthorizationMatch m;
  m.acc_vs_authorized = bit_accuracy(extracted, authorized);
  m.acc_vs_unauthorized = bit_accuracy(extracted, unauthorized);
  const double a = m.acc_vs_authorized.acc, u = m.acc_vs_unauthorized.acc;
  const bool a_ok = a >= threshold, u_ok = u >= threshold;
  if (a_ok && (!u_ok || a > u)) m.ruling = Ruling::Authorized;
  else if (u_ok && (!a_ok || u > a)) m.ruling = Ruling::Unauthorized;
  return m;
}

std::map<std::string, ArtistOutcome> multi_artist_verify(std::span<const ImageBuffer> images,
                                                         std::span<const RegistryRecord> records,
                                                         const NullModel& null, double alpha,
                                                         std::span<const std::string> group_labels) {
  if (!group_labels.empty() && group_labels.size() != images.size())
    throw Error(Errc::BadParameter, "one group label per image expected");
  std::vector<ArtistOutcome> outcomes(records.size());
  const auto count = static_cast<std::int64_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < count; ++r) {
    const RegistryRecord& rec = records[static_cast<std::size_t>(r)];
    ArtistOutcome& out = outcomes[static_cast<std::size_t>(r)];
    out.artist_id = rec.artist_id;
    try {
      if (group_labels.empty()) {
        out.verdict = extract_and_detect(images, rec.codec, rec.payload, null, alpha);
      } else {
        std::vector<ImageBuffer> subset;
        for (std::size_t i = 0; i < images.size(); ++i)
          if (group_labels[i] == rec.artist_id) subset.push_back(images[i]);
        out.verdict = extract_and_detect(subset, rec.codec, rec.payload, null, alpha);
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }
  std::map<std::string, ArtistOutcome> result;
  for (std::size_t r = 0; r < records.size(); ++r) result.emplace(records[r].record_id, std::move(outcomes[r]));
  return result;
}

std::vector<PowerPoint> power_curve(const ChannelModel& model, const NullModel& null, double alpha,
                                    std::span<const int> sample_counts, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(Errc::BadParameter, "trials must be >= 1");
  std::vector<PowerPoint> out;
  for (int n : sample_counts) {
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      const AccuracySampleSet s =
          sample_accuracies(model, n, Rng::mix(Rng::mix(seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(t)));
      hits += detect(s, null, alpha).decision == Decision::TheftDetected;
    }
    out.push_back({n, trials, static_cast<double>(hits) / trials});
  }
  return out;
}

}  // namespace mimicmark
