// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mimicmark/attacks.hpp"
#include "mimicmark/channel.hpp"
#include "mimicmark/codec.hpp"
#include "mimicmark/corpus.hpp"
#include "mimicmark/metrics.hpp"
#include "mimicmark/rng.hpp"
#include "mimicmark/stats.hpp"
#include "mimicmark/verify.hpp"

using namespace mimicmark;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SecretKey key_from_seed(std::uint64_t seed) {
  Rng rng(seed);
  SecretKey k;
  for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rng.below(256));
  return k;
}

WatermarkPayload random_payload(Rng& rng, int n = 32) {
  BitVector bits(static_cast<std::size_t>(n));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
  return WatermarkPayload(bits);
}

CodecConfig config(Method m, std::uint64_t key_seed) {
  CodecConfig c;
  c.method = m;
  c.key = key_from_seed(key_seed);
  return c;
}

// P(X >= k) for X ~ Binomial(n, 1/2), summed in log space.
double fair_coin_tail(int k, int n) {
  double total = 0.0;
  for (int j = std::max(k, 0); j <= n; ++j)
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) - n * std::log(2.0));
  return total;
}

const std::vector<ImageBuffer>& corpus20() {
  static const std::vector<ImageBuffer> c = synth_corpus(20, 512, 512, 20240601);
  return c;
}

Outcome roundtrip() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (Method m : {Method::DwtDct, Method::DwtDctSvd}) {
    const CodecConfig cfg = config(m, 11);
    Rng rng(5);
    double min_psnr = INFINITY;
    int exact = 0;
    for (const ImageBuffer& img : corpus20()) {
      const WatermarkPayload p = random_payload(rng);
      const EmbedResult e = embed(img, p, cfg);
      min_psnr = std::min(min_psnr, e.stats.psnr);
      exact += bit_accuracy(extract(e.watermarked, cfg).bits, p).correct_bits == 32;
    }
    ok = ok && exact == 20 && min_psnr >= 38.0;
    detail += fmt("%s exact %d/20 minPSNR %.2f; ", std::string(to_string(m)).c_str(), exact, min_psnr);
  }
  const double t = seconds_since(t0);
  return {ok && t < 30.0, detail + fmt("%.1fs", t)};
}

Outcome eq6() {
  BitVector ref(32, 1), got(32, 1);
  got[3] = got[17] = 0;
  const BitAccuracy a = bit_accuracy(got, ref);
  return {a.correct_bits == 30 && a.acc == 0.9375, fmt("30/32 -> %.17g", a.acc)};
}

Outcome null_behaviour() {
  const std::vector<ImageBuffer> clean = synth_corpus(100, 512, 512, 777);
  std::string detail;
  bool ok = true;
  for (Method m : {Method::DwtDct, Method::DwtDctSvd}) {
    const CodecConfig cfg = config(m, 21);
    Rng rng(9);
    long correct = 0, total = 0;
    for (const ImageBuffer& img : clean) {
      const BitAccuracy a = bit_accuracy(extract(img, cfg).bits, random_payload(rng));
      correct += a.correct_bits;
      total += a.total_bits;
    }
    const double unmarked = static_cast<double>(correct) / total;

    // Wrong key: embed under one key, extract under another.
    const CodecConfig wrong = config(m, 22);
    correct = total = 0;
    for (std::size_t i = 0; i < clean.size(); i += 2) {
      const WatermarkPayload p = random_payload(rng);
      const BitAccuracy a = bit_accuracy(extract(embed(clean[i], p, cfg).watermarked, wrong).bits, p);
      correct += a.correct_bits;
      total += a.total_bits;
    }
    const double wrong_key = static_cast<double>(correct) / total;
    ok = ok && std::abs(unmarked - 0.5) <= 0.03 && std::abs(wrong_key - 0.5) <= 0.03;
    detail += fmt("%s unmarked %.4f wrong-key %.4f; ", std::string(to_string(m)).c_str(), unmarked, wrong_key);
  }
  return {ok, detail};
}

Outcome robustness() {
  const CodecConfig cfg = config(Method::DwtDctSvd, 31);
  const CodecConfig pn = config(Method::DwtDct, 31);
  std::vector<ImageBuffer> marked, marked_pn;
  std::vector<WatermarkPayload> payloads;
  Rng rng(13);
  for (const ImageBuffer& img : corpus20()) {
    payloads.push_back(random_payload(rng));
    marked.push_back(embed(img, payloads.back(), cfg).watermarked);
    marked_pn.push_back(embed(img, payloads.back(), pn).watermarked);
  }
  auto corpus_acc = [&](const AttackSpec& spec, const CodecConfig& c, const std::vector<ImageBuffer>& set) {
    int correct = 0;
    for (std::size_t i = 0; i < set.size(); ++i) correct += attack_then_extract(set[i], spec, c, payloads[i]).correct_bits;
    return correct;
  };
  const int bits = 32 * static_cast<int>(marked.size());
  bool ok = true;
  std::string detail;
  for (const AttackSpec& spec : default_attack_suite()) {
    const int c = corpus_acc(spec, cfg, marked);
    const double p = fair_coin_tail(c, bits);
    ok = ok && p < 1e-6;
    detail += fmt("%s %.3f; ", spec.to_string().c_str(), static_cast<double>(c) / bits);
  }
  for (auto [label, c, set] : {std::tuple{"svd", &cfg, &marked}, std::tuple{"dct", &pn, &marked_pn}}) {
    double prev = 1.0;
    std::string seq;
    for (int q : {90, 75, 50, 30}) {
      const double a = static_cast<double>(corpus_acc(AttackSpec{attack::Jpeg{q}, {}}, *c, *set)) / bits;
      ok = ok && a <= prev;
      if (q == 75 && std::string(label) == "svd") ok = ok && a >= 0.90;
      prev = a;
      seq += fmt("%.3f ", a);
    }
    detail += fmt("jpeg[%s] 90..30: %s; ", label, seq.c_str());
  }
  return {ok, detail};
}

Outcome overlay() {
  const CodecConfig victim = config(Method::DwtDctSvd, 41);
  Rng rng(17);
  bool ok = true;
  std::string detail;
  for (const CodecConfig& over : {config(Method::DwtDctSvd, 42), config(Method::DwtDct, 43)}) {
    int orig = 0, second = 0, total = 0;
    for (const ImageBuffer& img : corpus20()) {
      const WatermarkPayload p = random_payload(rng), q = random_payload(rng);
      const ImageBuffer once = embed(img, p, victim).watermarked;
      const AttackedImage twice = apply_attack(once, AttackSpec{attack::Overlay{over, q}, {}});
      orig += bit_accuracy(extract(twice.image, victim).bits, p).correct_bits;
      second += bit_accuracy(extract(twice.image, over).bits, q).correct_bits;
      total += 32;
    }
    const double a = static_cast<double>(orig) / total;
    ok = ok && a >= 0.85 && fair_coin_tail(second, total) < 1e-6;
    detail += fmt("overlay %s: original %.3f overlay %.3f; ", std::string(to_string(over.method)).c_str(), a,
                  static_cast<double>(second) / total);
  }
  return {ok, detail};
}

Outcome calibration() {
  const auto t0 = Clock::now();
  bool ok = true;
  int checked = 0;
  std::string worst;
  double worst_p = 1.0;
  for (const PresetInfo& info : preset_catalog()) {
    if (info.bins.empty()) continue;
    const AccuracySampleSet s = sample_accuracies(info.model, 10000, 7);
    const Binning b = info.bins.size() == 5 ? Binning::Five : Binning::Ten;
    const std::vector<std::int64_t> observed = histogram(s, b);
    double row_total = 0.0;
    for (std::int64_t c : info.bins) row_total += static_cast<double>(c);
    std::vector<double> prop;
    for (std::int64_t c : info.bins) prop.push_back(static_cast<double>(c) / row_total);
    const stats::ChiSquare chi = stats::chi_square_gof(observed, prop);
    const double avg = summary(s).avg_bits;
    const bool row_ok = chi.p_value > 0.01 && std::abs(avg - info.avg) <= 0.5;
    ok = ok && row_ok;
    ++checked;
    if (chi.p_value < worst_p) {
      worst_p = chi.p_value;
      worst = info.id;
    }
    if (!row_ok) std::printf("    %s: avg %.2f vs %.2f, chi2 p %.3g\n", info.id.c_str(), avg, info.avg, chi.p_value);
  }
  const double t = seconds_since(t0);
  return {ok && checked > 0 && t < 10.0,
          fmt("%d presets, min chi2 p %.3f (%s), %.2fs", checked, worst_p, worst.c_str(), t)};
}

Outcome power_and_size() {
  const NullModel null = NullModel::chance(32);
  const ChannelModel marked = preset("t1-artist-watermarked");
  int hits = 0;
  for (int t = 0; t < 1000; ++t)
    hits += detect(sample_accuracies(marked, 100, Rng::mix(100, t)), null).decision == Decision::TheftDetected;
  const stats::BetaShape shape = stats::shape_from_moments(null.p0, null.rho);
  const ChannelModel nothing = ChannelModel::beta_binomial(32, shape.alpha, shape.beta, "null");
  int false_alarms = 0;
  for (int t = 0; t < 10000; ++t)
    false_alarms += detect(sample_accuracies(nothing, 100, Rng::mix(200, t)), null).decision == Decision::TheftDetected;
  // Largest count with P(Binomial(1e4, 1e-4) > count) >= 1e-3.
  constexpr int kAllowed = 5;
  return {hits >= 999 && false_alarms <= kAllowed,
          fmt("power %d/1000, false alarms %d/10000 (allowed %d)", hits, false_alarms, kAllowed)};
}

Outcome mixing() {
  const ChannelModel w = preset("s54-mix-watermarked"), c = preset("t1-artist-clean");
  bool ok = true;
  double prev = -1.0;
  std::string seq;
  for (double p : {0.0, 0.1, 0.4, 0.8, 1.0}) {
    const double mean = summary(sample_accuracies(mix(w, c, p), 10000, 8)).avg_bits / 32.0;
    ok = ok && mean >= prev;
    prev = mean;
    seq += fmt("%.4f ", mean);
  }
  const int best = summary(sample_accuracies(mix(w, c, 0.1), 1000, 9)).best_bits;
  return {ok && best >= 27, fmt("mean acc over p: %s; max at p=0.1: %d/32", seq.c_str(), best)};
}

Outcome isolation() {
  const std::vector<ImageBuffer> art = synth_corpus(50, 512, 512, 4242);
  std::vector<RegistryRecord> records;
  Rng rng(23);
  for (int a = 0; a < 3; ++a) {
    RegistryRecord r;
    r.record_id = fmt("rec-artist%d", a);
    r.artist_id = fmt("artist-%d", a);
    r.payload = random_payload(rng);
    r.codec = config(Method::DwtDctSvd, 500 + a);
    records.push_back(r);
  }
  // Artist 1 is the victim: the suspect model was trained on their marked works.
  std::vector<ImageBuffer> outputs;
  for (std::size_t i = 0; i < art.size(); ++i)
    outputs.push_back(surrogate_degrade(embed(art[i], records[1].payload, records[1].codec).watermarked,
                                        Severity::Standard, Rng::mix(61, i)));
  const auto outcomes = multi_artist_verify(outputs, records, NullModel::chance(32));
  bool ok = true;
  std::string detail;
  for (int a = 0; a < 3; ++a) {
    const ArtistOutcome& o = outcomes.at(records[a].record_id);
    if (!o.verdict) return {false, records[a].artist_id + ": " + o.error};
    ok = ok && (a == 1 ? o.flagged() : !o.flagged() && o.verdict->p_mean > 0.01);
    detail += fmt("%s %s p_mean %.3g; ", o.artist_id.c_str(), std::string(to_string(o.verdict->decision)).c_str(),
                  o.verdict->p_mean);
  }
  return {ok, detail};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const std::vector<ImageBuffer> art = synth_corpus(100, 512, 512, 99);
  const CodecConfig cfg = config(Method::DwtDctSvd, 71);
  const WatermarkPayload payload = WatermarkPayload::from_hex("c0ffee42");
  std::vector<ImageBuffer> from_marked, from_clean;
  for (std::size_t i = 0; i < art.size(); ++i) {
    from_marked.push_back(surrogate_degrade(embed(art[i], payload, cfg).watermarked, Severity::Standard, Rng::mix(5, i)));
    from_clean.push_back(surrogate_degrade(art[i], Severity::Standard, Rng::mix(5, i)));
  }
  const NullModel null = NullModel::chance(32);
  const VerificationVerdict vm = extract_and_detect(from_marked, cfg, payload, null);
  const VerificationVerdict vc = extract_and_detect(from_clean, cfg, payload, null);
  const double t = seconds_since(t0);
  return {vm.decision == Decision::TheftDetected && vc.decision == Decision::NoEvidence && t < 300.0,
          fmt("marked avg %.2f p_mean %.3g %s; clean avg %.2f p_mean %.3g %s; %.1fs", vm.avg_bits, vm.p_mean,
              std::string(to_string(vm.decision)).c_str(), vc.avg_bits, vc.p_mean,
              std::string(to_string(vc.decision)).c_str(), t)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"round-trip exactness", roundtrip},
      {"bit accuracy 30/32", eq6},
      {"null behaviour", null_behaviour},
      {"attack robustness floors", robustness},
      {"overlay attack", overlay},
      {"channel calibration", calibration},
      {"detector power and size", power_and_size},
      {"mixed proportions", mixing},
      {"multi-artist isolation", isolation},
      {"end-to-end pipeline", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s  (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
