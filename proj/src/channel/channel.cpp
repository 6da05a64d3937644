#include "mimicmark/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "mimicmark/error.hpp"
#include "mimicmark/rng.hpp"
#include "mimicmark/stats.hpp"
#include "presets_json.hpp"

namespace mimicmark {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::PaperTable: return "paper-table";
    case Provenance::Fitted: return "fitted";
    case Provenance::User: return "user";
  }
  return "user";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "paper-table") return Provenance::PaperTable;
  if (text == "fitted") return Provenance::Fitted;
  if (text == "user") return Provenance::User;
  throw Error(Errc::BadParameter, "unknown provenance '" + std::string(text) + "'");
}

ChannelModel ChannelModel::beta_binomial(int n_bits, double alpha, double beta, std::string label,
                                         Provenance provenance) {
  ChannelModel m;
  m.n_bits = n_bits;
  m.alpha = alpha;
  m.beta = beta;
  m.label = std::move(label);
  m.provenance = provenance;
  m.validate();
  return m;
}

std::vector<double> ChannelModel::pmf() const {
  if (!table_pmf.empty()) return table_pmf;
  return stats::beta_binomial_pmf(n_bits, alpha, beta);
}

double ChannelModel::mean_bits() const {
  if (!table_pmf.empty()) return stats::pmf_moments(table_pmf).mean;
  return n_bits * alpha / (alpha + beta);
}

void ChannelModel::validate() const {
  if (n_bits < 1) throw Error(Errc::BadParameter, "n_bits must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw Error(Errc::BadParameter, "beta-binomial shapes must be finite and > 0");
  if (!table_pmf.empty()) {
    if (table_pmf.size() != static_cast<std::size_t>(n_bits + 1))
      throw Error(Errc::BadParameter, "tabulated pmf must cover 0..n_bits");
    double total = 0.0;
    for (double p : table_pmf) {
      if (!(p >= 0.0)) throw Error(Errc::BadParameter, "negative pmf entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::BadParameter, "pmf does not sum to 1");
  }
}

void AccuracySampleSet::validate() const {
  if (n_bits < 1) throw Error(Errc::BadParameter, "n_bits must be positive");
  for (int k : samples)
    if (k < 0 || k > n_bits) throw Error(Errc::BadParameter, "sample " + std::to_string(k) + " outside [0, n_bits]");
  if (!groups.empty() && groups.size() != samples.size())
    throw Error(Errc::BadParameter, "group labels do not match sample count");
}

// ---- bin calibration ----

namespace {

struct TiltFit {
  std::vector<double> pmf;
  bool feasible = true;
};

std::vector<double> tilted(std::span<const double> props, int n, double theta) {
  const int nb = static_cast<int>(props.size());
  std::vector<double> pmf(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> z(static_cast<std::size_t>(nb), 0.0);
  std::vector<int> anchor(static_cast<std::size_t>(nb), theta > 0.0 ? -1 : n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto b = static_cast<std::size_t>(stats::accuracy_bin(k, n, nb));
    anchor[b] = theta > 0.0 ? std::max(anchor[b], k) : std::min(anchor[b], k);
  }
  for (int k = 0; k <= n; ++k) {
    const auto b = static_cast<std::size_t>(stats::accuracy_bin(k, n, nb));
    // Offsetting by the bin's heaviest K keeps exp() in range for large |theta|.
    pmf[static_cast<std::size_t>(k)] = std::exp(theta * (k - anchor[b]));
    z[b] += pmf[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k <= n; ++k) {
    const auto b = static_cast<std::size_t>(stats::accuracy_bin(k, n, nb));
    pmf[static_cast<std::size_t>(k)] *= props[b] / z[b];
  }
  return pmf;
}

TiltFit tilt_to_mean(std::span<const double> props, int n, double mean_bits) {
  constexpr double kThetaBound = 40.0;
  double lo = -kThetaBound, hi = kThetaBound;
  const double m_lo = stats::pmf_moments(tilted(props, n, lo)).mean;
  const double m_hi = stats::pmf_moments(tilted(props, n, hi)).mean;
  if (mean_bits <= m_lo) return {tilted(props, n, lo), mean_bits >= m_lo - 1e-9};
  if (mean_bits >= m_hi) return {tilted(props, n, hi), mean_bits <= m_hi + 1e-9};
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stats::pmf_moments(tilted(props, n, mid)).mean < mean_bits ? lo : hi) = mid;
  }
  return {tilted(props, n, 0.5 * (lo + hi)), true};
}

std::vector<double> proportions(std::span<const std::int64_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  if (counts.empty() || total <= 0.0) throw Error(Errc::DegenerateHistogram, "histogram is empty");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw Error(Errc::DegenerateHistogram, "negative bin count");
    p[i] = static_cast<double>(counts[i]) / total;
  }
  return p;
}

ChannelModel from_pmf(std::vector<double> pmf, int n, std::string label, Provenance provenance) {
  const stats::MomentSummary m = stats::pmf_moments(pmf);
  const double mu = std::clamp(m.mean / n, 1e-6, 1.0 - 1e-6);
  const stats::BetaShape s = stats::shape_from_moments(mu, stats::overdispersion(m.mean, m.variance, n));
  ChannelModel out;
  out.n_bits = n;
  out.alpha = s.alpha;
  out.beta = s.beta;
  out.label = std::move(label);
  out.provenance = provenance;
  out.table_pmf = std::move(pmf);
  out.validate();
  return out;
}

}  // namespace

ChannelModel calibrate_to_bins(std::span<const std::int64_t> bin_counts, int n_bits, double mean_bits,
                               std::string label, Provenance provenance) {
  if (n_bits < 1) throw Error(Errc::BadParameter, "n_bits must be positive");
  const std::vector<double> props = proportions(bin_counts);
  if (static_cast<int>(props.size()) > n_bits + 1)
    throw Error(Errc::BadParameter, "more bins than attainable counts");
  // Each nonempty bin must contain at least one attainable K.
  std::vector<int> reachable(props.size(), 0);
  for (int k = 0; k <= n_bits; ++k) reachable[static_cast<std::size_t>(stats::accuracy_bin(k, n_bits, static_cast<int>(props.size())))] = 1;
  for (std::size_t b = 0; b < props.size(); ++b)
    if (props[b] > 0.0 && !reachable[b]) throw Error(Errc::BadParameter, "bin holds mass but no attainable count");
  return from_pmf(tilt_to_mean(props, n_bits, mean_bits).pmf, n_bits, std::move(label), provenance);
}

// ---- fitting ----

ChannelModel fit_channel(std::span<const std::int64_t> histogram, int n_bits, std::optional<double> mean_bits) {
  if (n_bits < 1) throw Error(Errc::BadParameter, "n_bits must be positive");
  const std::vector<double> obs = proportions(histogram);
  const int nb = static_cast<int>(obs.size());
  if (nb < 2) throw Error(Errc::DegenerateHistogram, "need at least two bins");
  const auto nonempty = std::count_if(obs.begin(), obs.end(), [](double p) { return p > 0.0; });
  if (nonempty == 1 && (obs.front() > 0.0 || obs.back() > 0.0))
    throw Error(Errc::DegenerateHistogram, "all mass in an extreme bin");
  if (mean_bits && !(*mean_bits > 0.0 && *mean_bits < n_bits))
    throw Error(Errc::BadParameter, "pinned mean must lie strictly inside (0, n_bits)");

  // Moment matching on bin midpoints.
  double m1 = 0.0, m2 = 0.0;
  for (int b = 0; b < nb; ++b) {
    const double mid = (b + 0.5) / nb;
    m1 += obs[static_cast<std::size_t>(b)] * mid;
    m2 += obs[static_cast<std::size_t>(b)] * mid * mid;
  }
  double mu = mean_bits ? *mean_bits / n_bits : m1;
  double rho = stats::overdispersion(n_bits * m1, n_bits * n_bits * (m2 - m1 * m1), n_bits);
  constexpr double kMuEdge = 1e-3;
  constexpr double kRhoLo = 1e-4, kRhoHi = 0.9;
  mu = std::clamp(mu, kMuEdge, 1.0 - kMuEdge);
  rho = std::clamp(rho, kRhoLo, kRhoHi);

  auto distance = [&](double m, double r) {
    const stats::BetaShape s = stats::shape_from_moments(m, r);
    const std::vector<double> mass = stats::bin_mass(stats::beta_binomial_pmf(n_bits, s.alpha, s.beta), nb);
    double d = 0.0;
    for (int b = 0; b < nb; ++b) {
      const double e = std::max(mass[static_cast<std::size_t>(b)], 1e-12);
      const double diff = obs[static_cast<std::size_t>(b)] - e;
      d += diff * diff / e;
    }
    return d;
  };

  // Coarse-to-fine grid: mean on a linear scale, rho on a log scale.
  double mu_half = mean_bits ? 0.0 : 0.25;
  double log_rho_half = 0.5 * (std::log(kRhoHi) - std::log(kRhoLo));
  double log_rho_centre = 0.5 * (std::log(kRhoHi) + std::log(kRhoLo));
  double best_mu = mu, best_rho = rho, best = distance(mu, rho);
  constexpr int kSteps = 25;
  for (int level = 0; level < 6; ++level) {
    const double centre_mu = best_mu;
    for (int i = -kSteps; i <= kSteps; ++i) {
      const double m = std::clamp(centre_mu + mu_half * i / kSteps, kMuEdge, 1.0 - kMuEdge);
      for (int j = -kSteps; j <= kSteps; ++j) {
        const double r = std::clamp(std::exp(log_rho_centre + log_rho_half * j / kSteps), kRhoLo, kRhoHi);
        const double d = distance(m, r);
        if (d < best) {
          best = d;
          best_mu = m;
          best_rho = r;
        }
      }
      if (mu_half == 0.0) break;
    }
    mu_half *= 0.15;
    log_rho_centre = std::log(best_rho);
    log_rho_half *= 0.15;
  }
  const stats::BetaShape s = stats::shape_from_moments(best_mu, best_rho);
  return ChannelModel::beta_binomial(n_bits, s.alpha, s.beta, "fitted", Provenance::Fitted);
}

// ---- sampling ----

AccuracySampleSet sample_accuracies(const ChannelModel& model, int count, std::uint64_t seed) {
  if (count < 1) throw Error(Errc::BadParameter, "sample count must be >= 1");
  model.validate();
  const std::vector<double> pmf = model.pmf();
  const stats::DiscreteSampler draw(pmf);
  Rng rng(seed);
  AccuracySampleSet out;
  out.n_bits = model.n_bits;
  out.seed = seed;
  out.samples.resize(static_cast<std::size_t>(count));
  for (int& k : out.samples) k = draw(rng.next_u64());
  return out;
}

std::vector<double> ChannelMixture::pmf() const {
  const std::vector<double> w = watermarked.pmf(), c = clean.pmf();
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out[k] = weight * w[k] + (1.0 - weight) * c[k];
  return out;
}

double ChannelMixture::mean_bits() const {
  return weight * watermarked.mean_bits() + (1.0 - weight) * clean.mean_bits();
}

ChannelMixture mix(const ChannelModel& watermarked, const ChannelModel& clean, double p_watermarked, MixingCurve q) {
  if (watermarked.n_bits != clean.n_bits)
    throw Error(Errc::BitLengthMismatch, "mixture components have different payload lengths");
  if (!(p_watermarked >= 0.0 && p_watermarked <= 1.0))
    throw Error(Errc::BadParameter, "watermarked proportion must be in [0, 1]");
  if (q == nullptr || q(0.0) != 0.0 || q(1.0) != 1.0)
    throw Error(Errc::BadParameter, "mixing curve must map 0 to 0 and 1 to 1");
  const double w = q(p_watermarked);
  if (!(w >= 0.0 && w <= 1.0)) throw Error(Errc::BadParameter, "mixing curve left [0, 1]");
  watermarked.validate();
  clean.validate();
  return {watermarked, clean, p_watermarked, w};
}

AccuracySampleSet sample_accuracies(const ChannelMixture& mixture, int count, std::uint64_t seed) {
  if (count < 1) throw Error(Errc::BadParameter, "sample count must be >= 1");
  const std::vector<double> pw = mixture.watermarked.pmf(), pc = mixture.clean.pmf();
  const stats::DiscreteSampler draw_w(pw), draw_c(pc);
  const bool always = mixture.weight >= 1.0;
  const auto cut = always ? std::uint64_t{0} : static_cast<std::uint64_t>(std::ldexp(mixture.weight, 64));
  Rng rng(seed);
  AccuracySampleSet out;
  out.n_bits = mixture.watermarked.n_bits;
  out.seed = seed;
  out.samples.resize(static_cast<std::size_t>(count));
  out.groups.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const bool from_w = always || rng.next_u64() < cut;
    const std::uint64_t word = rng.next_u64();
    out.samples[static_cast<std::size_t>(i)] = from_w ? draw_w(word) : draw_c(word);
    out.groups[static_cast<std::size_t>(i)] = from_w ? "watermarked" : "clean";
  }
  return out;
}

ChannelModel two_stage(const ChannelModel& model) {
  model.validate();
  const PresetInfo& profile = preset_info("t3-two-stage");
  const double target = kTwoStageMeanRatio * model.mean_bits();
  std::string label = model.label.empty() ? "two-stage" : model.label + "+two-stage";
  const std::vector<double> props = proportions(profile.bins);
  const TiltFit fit = tilt_to_mean(props, model.n_bits, target);
  if (fit.feasible) return from_pmf(fit.pmf, model.n_bits, std::move(label), Provenance::Fitted);
  const double mu = target / model.n_bits;
  const stats::BetaShape s = stats::shape_from_moments(mu, std::clamp(model.overdispersion(), stats::kMinRho, stats::kMaxRho));
  return ChannelModel::beta_binomial(model.n_bits, s.alpha, s.beta, std::move(label), Provenance::Fitted);
}

// ---- catalog ----

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = [] {
    const nlohmann::ordered_json doc = nlohmann::ordered_json::parse(kPresetCatalogJson);
    std::vector<PresetInfo> out;
    for (const auto& [id, e] : doc.items()) {
      PresetInfo p;
      p.id = id;
      p.family = e.at("family").get<std::string>();
      p.source = e.at("source").get<std::string>();
      p.row = e.at("row").get<std::string>();
      p.n_bits = e.at("n_bits").get<int>();
      p.avg = e.at("avg").get<double>();
      p.best = e.at("best").get<int>();
      const Provenance prov = parse_provenance(e.at("provenance").get<std::string>());
      if (p.family == "binned") {
        p.bins = e.at("bins").get<std::vector<std::int64_t>>();
        p.model = calibrate_to_bins(p.bins, p.n_bits, p.avg, id, prov);
      } else {
        p.model = ChannelModel::beta_binomial(p.n_bits, e.at("alpha").get<double>(), e.at("beta").get<double>(), id, prov);
      }
      out.push_back(std::move(p));
    }
    return out;
  }();
  return catalog;
}

const PresetInfo& preset_info(std::string_view name) {
  for (const PresetInfo& p : preset_catalog())
    if (p.id == name) return p;
  throw Error(Errc::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

ChannelModel preset(std::string_view name) { return preset_info(name).model; }

}  // namespace mimicmark
