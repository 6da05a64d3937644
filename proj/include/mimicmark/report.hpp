#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mimicmark/channel.hpp"
#include "mimicmark/verify.hpp"

namespace mimicmark {

using Json = nlohmann::ordered_json;

// ---- file formats ----

/// samples.json: {n_bits, seed, samples: [ints], groups: [labels]}
Json to_json(const AccuracySampleSet& s);
AccuracySampleSet samples_from_json(const Json& j);

/// verdict.json: the VerificationVerdict fields, one for one.
Json to_json(const VerificationVerdict& v);
VerificationVerdict verdict_from_json(const Json& j);

Json to_json(const NullModel& n);

// ---- run reports ----

struct ManifestEntry {
  std::string path;
  std::string sha256;
};

struct ImageResult {
  std::string path;
  std::string sha256;
  std::optional<std::string> output_path;
  std::optional<std::string> output_sha256;
  std::optional<double> psnr;
  std::optional<int> correct_bits;
  std::optional<int> n_bits;
  std::optional<std::string> error;
};

struct VerdictEntry {
  std::string label;  // artist, record id or sample source
  std::optional<VerificationVerdict> verdict;
  std::optional<Json> null_model;
  std::optional<std::string> error;
};

struct ProvenanceTag {
  std::string source;  // preset id, "measured", ...
  std::string provenance;
};

/// Everything a command did, with enough inputs (hashes, seeds) to redo it.
/// `generated_at` is the only field outside the canonical body.
struct RunReport {
  std::string command;
  std::vector<std::string> arguments;
  std::vector<ManifestEntry> inputs;
  std::vector<ImageResult> images;
  std::optional<AccuracySampleSet> samples;
  std::vector<VerdictEntry> verdicts;
  std::vector<ProvenanceTag> provenance;
  std::string tool_version;
  std::vector<std::uint64_t> seeds;
  std::string generated_at;
};

/// {"report": <canonical body>, "canonical_sha256": ..., "timestamps": {...}}
Json to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);
/// SHA-256 of the compact dump of the canonical body.
std::string canonical_hash(const RunReport& r);

// ---- paper-style tables and plot data ----

struct TableRow {
  std::string label;
  std::vector<std::int64_t> bins;
  double avg_bits = 0.0;
  int best_bits = 0;
};
TableRow table_row(std::string label, const AccuracySampleSet& samples, Binning binning);

/// Header "condition,<bin ranges...>,avg(bits),best(bits)" then one line
/// per row. Bin ranges read "0-20%".."80-100%" or "0-10%".."90-100%".
std::string table_csv(std::span<const TableRow> rows, Binning binning);

/// Histogram series for both binnings, and detection power against `null`
/// when resampling from the observed samples at several N.
Json plot_data(const AccuracySampleSet& samples, const NullModel& null, double alpha, std::uint64_t seed);

}  // namespace mimicmark
