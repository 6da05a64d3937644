#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "mimicmark/channel.hpp"
#include "mimicmark/corpus.hpp"
#include "mimicmark/metrics.hpp"
#include "mimicmark/stats.hpp"
#include "mimicmark/verify.hpp"

using namespace mimicmark;
using namespace testutil;

namespace {

// Beta-binomial pmf from rising products, no special functions.
double bb_oracle(int k, int n, double a, double b) {
  double num = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  for (int i = 0; i < k; ++i) num *= a + i;
  for (int j = 0; j < n - k; ++j) num *= b + j;
  for (int m = 0; m < n; ++m) num /= a + b + m;
  return num;
}

double mean_of(const std::vector<double>& pmf) {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
  return m;
}

}  // namespace

TEST_CASE("beta-binomial pmf against the rising-product form") {
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{9.5, 6.1}, std::pair{0.3, 2.0}, std::pair{40.0, 40.0}}) {
    const std::vector<double> pmf = stats::beta_binomial_pmf(32, a, b);
    REQUIRE(pmf.size() == 33);
    double total = 0.0;
    for (int k = 0; k <= 32; ++k) {
      CHECK(pmf[k] == doctest::Approx(bb_oracle(k, 32, a, b)).epsilon(1e-10));
      total += pmf[k];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_of(pmf) == doctest::Approx(32.0 * a / (a + b)).epsilon(1e-10));
  }
  // Uniform prior gives a uniform count.
  for (double p : stats::beta_binomial_pmf(32, 1.0, 1.0)) CHECK(p == doctest::Approx(1.0 / 33));
}

TEST_CASE("moment helpers") {
  const stats::BetaShape s = stats::shape_from_moments(0.6, 0.05);
  CHECK(s.alpha / (s.alpha + s.beta) == doctest::Approx(0.6));
  CHECK(1.0 / (s.alpha + s.beta + 1.0) == doctest::Approx(0.05));

  const std::vector<double> pmf = stats::beta_binomial_pmf(32, s.alpha, s.beta);
  const stats::MomentSummary m = stats::pmf_moments(pmf);
  CHECK(m.mean == doctest::Approx(19.2));
  CHECK(stats::overdispersion(m.mean, m.variance, 32) == doctest::Approx(0.05));
  // Binomial variance means no overdispersion, clamped to the floor.
  CHECK(stats::overdispersion(16.0, 8.0, 32) == doctest::Approx(stats::kMinRho));
}

TEST_CASE("accuracy bins are left-closed with the top bin closed") {
  CHECK(stats::accuracy_bin(0, 32, 5) == 0);
  CHECK(stats::accuracy_bin(6, 32, 5) == 0);   // 18.75%
  CHECK(stats::accuracy_bin(7, 32, 5) == 1);   // 21.9%
  CHECK(stats::accuracy_bin(16, 32, 10) == 5); // exactly 50%
  CHECK(stats::accuracy_bin(32, 32, 5) == 4);
  CHECK(stats::accuracy_bin(32, 32, 10) == 9);
  const std::vector<double> mass = stats::bin_mass(std::vector<double>(33, 1.0 / 33), 5);
  CHECK(mass.size() == 5);
  CHECK(mass[0] == doctest::Approx(7.0 / 33));  // k = 0..6
}

TEST_CASE("chi-square goodness of fit") {
  // Statistic by hand: (30-25)^2/25 + (20-25)^2/25 = 2, one degree of freedom.
  const std::vector<std::int64_t> obs{30, 20};
  const stats::ChiSquare c = stats::chi_square_gof(obs, std::vector<double>{0.5, 0.5});
  CHECK(c.statistic == doctest::Approx(2.0));
  CHECK(c.dof == 1);
  CHECK(c.p_value == doctest::Approx(0.157299207050285).epsilon(1e-9));
  // Zero-expectation cells are skipped.
  const std::vector<std::int64_t> obs3{30, 0, 20};
  CHECK(stats::chi_square_gof(obs3, std::vector<double>{0.5, 0.0, 0.5}).dof == 1);
  CHECK(stats::normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
  CHECK(stats::normal_sf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("two-sample KS") {
  const std::vector<int> a{1, 2, 3, 4, 5}, b{11, 12, 13, 14, 15};
  CHECK(stats::ks_two_sample(a, a).statistic == 0.0);
  CHECK(stats::ks_two_sample(a, a).p_value == doctest::Approx(1.0));
  CHECK(stats::ks_two_sample(a, b).statistic == 1.0);
  std::vector<int> big_a(400), big_b(400);
  Rng rng(1);
  for (int& v : big_a) v = static_cast<int>(rng.below(10));
  for (int& v : big_b) v = static_cast<int>(rng.below(10)) + 3;
  CHECK(stats::ks_two_sample(big_a, big_b).p_value < 1e-6);
}

TEST_CASE("discrete sampler is exact at the edges and fair in the bulk") {
  const std::vector<double> half{0.5, 0.5};
  const stats::DiscreteSampler s(half);
  CHECK(s(0) == 0);
  CHECK(s((std::uint64_t{1} << 63) - 1) == 0);
  CHECK(s(std::uint64_t{1} << 63) == 1);
  CHECK(s(UINT64_MAX) == 1);
  const std::vector<double> trailing_zero{0.25, 0.75, 0.0};
  CHECK(stats::DiscreteSampler(trailing_zero)(UINT64_MAX) == 1);

  const std::vector<double> pmf = stats::beta_binomial_pmf(32, 3.0, 2.0);
  const stats::DiscreteSampler draw(pmf);
  Rng rng(99);
  std::vector<std::int64_t> counts(33, 0);
  for (int i = 0; i < 20000; ++i) ++counts[static_cast<std::size_t>(draw(rng.next_u64()))];
  CHECK(stats::chi_square_gof(counts, pmf).p_value > 1e-3);
}

TEST_CASE("channel model basics") {
  const ChannelModel m = ChannelModel::beta_binomial(32, 6.0, 4.0, "x");
  CHECK(m.mean_bits() == doctest::Approx(19.2));
  CHECK(m.mean_accuracy() == doctest::Approx(0.6));
  CHECK(m.overdispersion() == doctest::Approx(1.0 / 11.0));
  CHECK_THROWS_CODE(ChannelModel::beta_binomial(32, -1.0, 1.0).validate(), Errc::BadParameter);
  CHECK(to_string(Provenance::PaperTable) == "paper-table");
  CHECK(parse_provenance("fitted") == Provenance::Fitted);
}

TEST_CASE("sampling is reproducible per seed") {
  const ChannelModel m = preset("t1-artist-watermarked");
  const AccuracySampleSet a = sample_accuracies(m, 500, 11), b = sample_accuracies(m, 500, 11);
  CHECK(a.samples == b.samples);
  CHECK(a.seed == 11);
  CHECK(sample_accuracies(m, 500, 12).samples != a.samples);
  for (int k : a.samples) CHECK((k >= 0 && k <= 32));
}

TEST_CASE("preset catalogue matches the source tables") {
  CHECK(preset_catalog().size() == 24);
  const PresetInfo& w = preset_info("t1-artist-watermarked");
  CHECK(w.bins == std::vector<std::int64_t>{0, 0, 109, 867, 24});
  CHECK(w.avg == 19.54);
  CHECK(w.best == 29);
  CHECK(preset_info("t1-artist-clean").bins == std::vector<std::int64_t>{0, 255, 741, 4, 0});
  CHECK(preset_info("t3-two-stage").avg == 19.02);
  CHECK(preset_info("t3-normal-finetune").bins.size() == 10);
  CHECK_THROWS_CODE(preset("t9-nothing"), Errc::UnknownPreset);

  for (const PresetInfo& info : preset_catalog()) {
    CAPTURE(info.id);
    CHECK(info.model.n_bits == 32);
    CHECK(info.model.mean_bits() == doctest::Approx(info.avg).epsilon(1e-6));
    if (info.bins.empty()) continue;
    // Tabulated law reproduces the row's bin masses exactly.
    const std::vector<double> mass = stats::bin_mass(info.model.pmf(), static_cast<int>(info.bins.size()));
    const double total = static_cast<double>(std::accumulate(info.bins.begin(), info.bins.end(), std::int64_t{0}));
    for (std::size_t b = 0; b < mass.size(); ++b)
      CHECK(mass[b] == doctest::Approx(static_cast<double>(info.bins[b]) / total).epsilon(1e-9));
  }
}

TEST_CASE("clean preset reproduces its row proportions under sampling") {
  const AccuracySampleSet s = sample_accuracies(preset("t1-artist-clean"), 10000, 21);
  const std::vector<std::int64_t> h = histogram(s, Binning::Five);
  const double want[] = {0.0, 0.255, 0.741, 0.004, 0.0};
  for (std::size_t b = 0; b < 5; ++b) CHECK(std::abs(static_cast<double>(h[b]) / 10000.0 - want[b]) <= 0.03);
}

TEST_CASE("calibrate_to_bins hits feasible means and clamps infeasible ones") {
  const std::vector<std::int64_t> bins{0, 10, 80, 10, 0};
  const ChannelModel m = calibrate_to_bins(bins, 32, 16.0);
  CHECK(m.mean_bits() == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(m.provenance == Provenance::Fitted);
  // The 40-60% bin holds k = 13..19; no law over these bins can average 25.
  const ChannelModel far = calibrate_to_bins(bins, 32, 25.0);
  CHECK(far.mean_bits() < 25.0);
  const std::vector<double> mass = stats::bin_mass(far.pmf(), 5);
  CHECK(mass[2] == doctest::Approx(0.8));
}

TEST_CASE("fit_channel recovers a known beta-binomial") {
  const stats::BetaShape shape = stats::shape_from_moments(0.62, 0.04);
  const ChannelModel truth = ChannelModel::beta_binomial(32, shape.alpha, shape.beta);
  const AccuracySampleSet s = sample_accuracies(truth, 20000, 5);
  const ChannelModel fit = fit_channel(histogram(s, Binning::Ten), 32);
  CHECK(fit.mean_accuracy() == doctest::Approx(0.62).epsilon(0.03));
  CHECK(fit.overdispersion() == doctest::Approx(0.04).epsilon(0.5));
  CHECK(fit.provenance == Provenance::Fitted);

  const ChannelModel pinned = fit_channel(std::vector<std::int64_t>{0, 0, 109, 867, 24}, 32, 19.54);
  CHECK(pinned.mean_bits() == doctest::Approx(19.54).epsilon(1e-6));
  CHECK_THROWS_CODE(fit_channel(std::vector<std::int64_t>{0, 0, 0, 0, 0}, 32), Errc::DegenerateHistogram);
}

TEST_CASE("mixtures") {
  const ChannelModel w = preset("s54-mix-watermarked"), c = preset("t1-artist-clean");
  const ChannelMixture half = mix(w, c, 0.5);
  const std::vector<double> pw = w.pmf(), pc = c.pmf(), pm = half.pmf();
  for (std::size_t k = 0; k < pm.size(); ++k) CHECK(pm[k] == doctest::Approx(0.5 * pw[k] + 0.5 * pc[k]));
  CHECK(half.mean_bits() == doctest::Approx(0.5 * (w.mean_bits() + c.mean_bits())));
  CHECK(mix(w, c, 0.0).mean_bits() == doctest::Approx(c.mean_bits()));
  CHECK(mix(w, c, 1.0).mean_bits() == doctest::Approx(w.mean_bits()));
  CHECK(mix(w, c, 0.5, [](double p) { return p * p; }).weight == doctest::Approx(0.25));
  CHECK_THROWS_CODE(mix(w, c, 1.5), Errc::BadParameter);
  CHECK_THROWS_CODE(mix(w, c, 0.5, [](double) { return 0.5; }), Errc::BadParameter);
  ChannelModel short_model = ChannelModel::beta_binomial(16, 2.0, 2.0);
  CHECK_THROWS_CODE(mix(w, short_model, 0.5), Errc::BitLengthMismatch);

  const AccuracySampleSet s = sample_accuracies(mix(w, c, 0.3), 2000, 4);
  REQUIRE(s.groups.size() == s.samples.size());
  const auto marked = std::count(s.groups.begin(), s.groups.end(), "watermarked");
  CHECK(marked == doctest::Approx(600).epsilon(0.15));
  CHECK(std::count(s.groups.begin(), s.groups.end(), "clean") == 2000 - marked);
}

TEST_CASE("mixture mean is monotone in the watermarked share") {
  const ChannelModel w = preset("t1-artist-watermarked"), c = preset("t1-artist-clean");
  double prev = 0.0;
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    const double m = mix(w, c, p).mean_bits();
    CHECK(m >= prev - 1e-12);
    prev = m;
  }
}

TEST_CASE("two-stage fine-tuning") {
  const ChannelModel t = two_stage(preset("t3-normal-finetune"));
  CHECK(t.mean_bits() == doctest::Approx(19.02).epsilon(1e-3));
  CHECK(kTwoStageMeanRatio == doctest::Approx(19.02 / 19.96));
  const ChannelModel clean = preset("t1-artist-clean");
  const ChannelModel tc = two_stage(clean);
  CHECK(tc.mean_bits() == doctest::Approx(clean.mean_bits() * kTwoStageMeanRatio).epsilon(1e-3));
  CHECK(tc.mean_bits() < clean.mean_bits());
}

TEST_CASE("surrogate degradation") {
  CHECK(parse_severity("standard") == Severity::Standard);
  CHECK(to_string(Severity::Harsh) == "harsh");
  CHECK_THROWS_CODE(parse_severity("brutal"), Errc::BadParameter);
  const DegradeProfile mild = degrade_profile(Severity::Mild), harsh = degrade_profile(Severity::Harsh);
  CHECK(mild.noise_sigma < harsh.noise_sigma);
  CHECK(mild.jpeg_quality > harsh.jpeg_quality);

  const ImageBuffer img = synth_natural_image(128, 96, 1);
  const ImageBuffer a = surrogate_degrade(img, Severity::Standard, 3);
  CHECK(a.same_shape(img));
  CHECK(a == surrogate_degrade(img, Severity::Standard, 3));
  CHECK(!(a == surrogate_degrade(img, Severity::Standard, 4)));
  CHECK(psnr(img, surrogate_degrade(img, Severity::Mild, 3)) > psnr(img, surrogate_degrade(img, Severity::Harsh, 3)));
}
