#include "mimicmark/report.hpp"

#include <cstdio>

#include "mimicmark/corpus.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/rng.hpp"

namespace mimicmark {

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Decision parse_decision(const std::string& s) {
  if (s == "theft-detected") return Decision::TheftDetected;
  if (s == "no-evidence") return Decision::NoEvidence;
  throw Error(Errc::BadParameter, "unknown decision '" + s + "'");
}

Json body(const RunReport& r) {
  Json j;
  j["command"] = r.command;
  j["arguments"] = r.arguments;
  Json inputs = Json::array();
  for (const ManifestEntry& m : r.inputs) inputs.push_back({{"path", m.path}, {"sha256", m.sha256}});
  j["inputs"] = inputs;
  Json images = Json::array();
  for (const ImageResult& im : r.images) {
    Json e;
    e["path"] = im.path;
    e["sha256"] = im.sha256;
    e["output_path"] = opt(im.output_path);
    e["output_sha256"] = opt(im.output_sha256);
    e["psnr"] = opt(im.psnr);
    e["correct_bits"] = opt(im.correct_bits);
    e["n_bits"] = opt(im.n_bits);
    e["error"] = opt(im.error);
    images.push_back(e);
  }
  j["images"] = images;
  j["samples"] = r.samples ? to_json(*r.samples) : Json(nullptr);
  Json verdicts = Json::array();
  for (const VerdictEntry& v : r.verdicts) {
    Json e;
    e["label"] = v.label;
    e["verdict"] = v.verdict ? to_json(*v.verdict) : Json(nullptr);
    e["null"] = v.null_model ? *v.null_model : Json(nullptr);
    e["error"] = opt(v.error);
    verdicts.push_back(e);
  }
  j["verdicts"] = verdicts;
  Json prov = Json::array();
  for (const ProvenanceTag& p : r.provenance) prov.push_back({{"source", p.source}, {"provenance", p.provenance}});
  j["provenance"] = prov;
  j["tool_version"] = r.tool_version;
  j["seeds"] = r.seeds;
  return j;
}

}  // namespace

Json to_json(const AccuracySampleSet& s) {
  Json j;
  j["n_bits"] = s.n_bits;
  j["seed"] = s.seed;
  j["samples"] = s.samples;
  j["groups"] = s.groups;
  return j;
}

AccuracySampleSet samples_from_json(const Json& j) {
  AccuracySampleSet s;
  try {
    s.n_bits = j.at("n_bits").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.samples = j.at("samples").get<std::vector<int>>();
    if (j.contains("groups") && !j.at("groups").is_null()) s.groups = j.at("groups").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadParameter, std::string("malformed samples document: ") + e.what());
  }
  s.validate();
  return s;
}

Json to_json(const VerificationVerdict& v) {
  Json j;
  j["avg_bits"] = v.avg_bits;
  j["best_bits"] = v.best_bits;
  j["histogram_5bin"] = v.histogram_5bin;
  j["histogram_10bin"] = v.histogram_10bin;
  j["p_mean"] = v.p_mean;
  j["p_max"] = v.p_max;
  j["p_ks"] = opt(v.p_ks);
  j["decision"] = std::string(to_string(v.decision));
  j["alpha_used"] = v.alpha_used;
  j["sample_count"] = v.sample_count;
  j["n_bits"] = v.n_bits;
  return j;
}

VerificationVerdict verdict_from_json(const Json& j) {
  VerificationVerdict v;
  try {
    v.avg_bits = j.at("avg_bits").get<double>();
    v.best_bits = j.at("best_bits").get<int>();
    v.histogram_5bin = j.at("histogram_5bin").get<std::vector<std::int64_t>>();
    v.histogram_10bin = j.at("histogram_10bin").get<std::vector<std::int64_t>>();
    v.p_mean = j.at("p_mean").get<double>();
    v.p_max = j.at("p_max").get<double>();
    v.p_ks = get_opt<double>(j, "p_ks");
    v.decision = parse_decision(j.at("decision").get<std::string>());
    v.alpha_used = j.at("alpha_used").get<double>();
    v.sample_count = j.at("sample_count").get<std::int64_t>();
    v.n_bits = j.value("n_bits", 32);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadParameter, std::string("malformed verdict document: ") + e.what());
  }
  return v;
}

Json to_json(const NullModel& n) {
  Json j;
  j["kind"] = std::string(to_string(n.kind));
  j["n_bits"] = n.n_bits;
  j["p0"] = n.p0;
  j["rho"] = n.rho;
  j["reference_count"] = n.reference_samples ? Json(n.reference_samples->size()) : Json(nullptr);
  return j;
}

std::string canonical_hash(const RunReport& r) {
  const std::string text = body(r).dump();
  return sha256_hex(text.data(), text.size());
}

Json to_json(const RunReport& r) {
  Json j;
  j["report"] = body(r);
  j["canonical_sha256"] = canonical_hash(r);
  j["timestamps"] = {{"generated_at", r.generated_at}};
  return j;
}

RunReport run_report_from_json(const Json& doc) {
  RunReport r;
  try {
    const Json& j = doc.contains("report") ? doc.at("report") : doc;
    r.command = j.value("command", std::string{});
    if (j.contains("arguments")) r.arguments = j.at("arguments").get<std::vector<std::string>>();
    for (const Json& m : j.value("inputs", Json::array())) r.inputs.push_back({m.at("path"), m.at("sha256")});
    for (const Json& e : j.value("images", Json::array())) {
      ImageResult im;
      im.path = e.at("path").get<std::string>();
      im.sha256 = e.value("sha256", std::string{});
      im.output_path = get_opt<std::string>(e, "output_path");
      im.output_sha256 = get_opt<std::string>(e, "output_sha256");
      im.psnr = get_opt<double>(e, "psnr");
      im.correct_bits = get_opt<int>(e, "correct_bits");
      im.n_bits = get_opt<int>(e, "n_bits");
      im.error = get_opt<std::string>(e, "error");
      r.images.push_back(std::move(im));
    }
    if (j.contains("samples") && !j.at("samples").is_null()) r.samples = samples_from_json(j.at("samples"));
    for (const Json& e : j.value("verdicts", Json::array())) {
      VerdictEntry v;
      v.label = e.value("label", std::string{});
      if (e.contains("verdict") && !e.at("verdict").is_null()) v.verdict = verdict_from_json(e.at("verdict"));
      if (e.contains("null") && !e.at("null").is_null()) v.null_model = e.at("null");
      v.error = get_opt<std::string>(e, "error");
      r.verdicts.push_back(std::move(v));
    }
    for (const Json& p : j.value("provenance", Json::array())) r.provenance.push_back({p.at("source"), p.at("provenance")});
    r.tool_version = j.value("tool_version", std::string{});
    if (j.contains("seeds")) r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("timestamps")) r.generated_at = doc.at("timestamps").value("generated_at", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadParameter, std::string("malformed run report: ") + e.what());
  }
  return r;
}

TableRow table_row(std::string label, const AccuracySampleSet& samples, Binning binning) {
  const SampleSummary s = summary(samples);
  return {std::move(label), histogram(samples, binning), s.avg_bits, s.best_bits};
}

std::string table_csv(std::span<const TableRow> rows, Binning binning) {
  const int nb = bin_count(binning);
  const int width = 100 / nb;
  std::string out = "condition";
  for (int b = 0; b < nb; ++b) out += "," + std::to_string(b * width) + "-" + std::to_string((b + 1) * width) + "%";
  out += ",avg(bits),best(bits)\n";
  for (const TableRow& r : rows) {
    if (static_cast<int>(r.bins.size()) != nb) throw Error(Errc::BadParameter, "row '" + r.label + "' has wrong bin count");
    // Quote labels that would break the column layout.
    if (r.label.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char c : r.label) out += c == '"' ? std::string("\"\"") : std::string(1, c);
      out += '"';
    } else {
      out += r.label;
    }
    for (std::int64_t c : r.bins) out += "," + std::to_string(c);
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.2f,%d\n", r.avg_bits, r.best_bits);
    out += buf;
  }
  return out;
}

Json plot_data(const AccuracySampleSet& samples, const NullModel& null, double alpha, std::uint64_t seed) {
  Json j;
  for (Binning b : {Binning::Five, Binning::Ten}) {
    const int nb = bin_count(b);
    Json labels = Json::array();
    for (int i = 0; i < nb; ++i) labels.push_back(std::to_string(i * 100 / nb) + "-" + std::to_string((i + 1) * 100 / nb) + "%");
    j[b == Binning::Five ? "histogram_5bin" : "histogram_10bin"] = {{"bins", labels}, {"counts", histogram(samples, b)}};
  }
  // Empirical law of the observed samples, resampled at several N.
  std::vector<double> pmf(static_cast<std::size_t>(samples.n_bits + 1), 0.0);
  for (int k : samples.samples) pmf[static_cast<std::size_t>(k)] += 1.0 / static_cast<double>(samples.size());
  ChannelModel empirical;
  empirical.n_bits = samples.n_bits;
  const SampleSummary s = summary(samples);
  const double mu = std::clamp(s.avg_bits / samples.n_bits, 1e-6, 1.0 - 1e-6);
  empirical.alpha = mu;
  empirical.beta = 1.0 - mu;
  empirical.table_pmf = pmf;
  empirical.label = "observed";
  empirical.provenance = Provenance::Fitted;
  static constexpr int kCounts[] = {10, 20, 50, 100, 200, 500, 1000};
  constexpr int kTrials = 200;
  Json n_axis = Json::array(), rate = Json::array();
  for (const PowerPoint& p : power_curve(empirical, null, alpha, kCounts, kTrials, seed)) {
    n_axis.push_back(p.sample_count);
    rate.push_back(p.detection_rate);
  }
  j["power_curve"] = {{"sample_count", n_axis}, {"detection_rate", rate}, {"trials", kTrials}, {"alpha", alpha},
                      {"null", to_json(null)}, {"seed", seed}};
  return j;
}

}  // namespace mimicmark
