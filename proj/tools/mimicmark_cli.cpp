// mimicmark command-line front end.
//
// Exit status: 0 success, 1 usage error, 2 data error, 3 theft detected
// (verify --fail-on-theft).

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mimicmark/attacks.hpp"
#include "mimicmark/channel.hpp"
#include "mimicmark/codec.hpp"
#include "mimicmark/corpus.hpp"
#include "mimicmark/error.hpp"
#include "mimicmark/image_io.hpp"
#include "mimicmark/metrics.hpp"
#include "mimicmark/registry.hpp"
#include "mimicmark/report.hpp"
#include "mimicmark/rng.hpp"
#include "mimicmark/verify.hpp"
#include "mimicmark/version.hpp"

namespace fs = std::filesystem;
using namespace mimicmark;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTheft = 3;

struct Context {
  std::vector<std::string> arguments;
  std::string registry = "registry.jsonl";
  int jobs = 0;  // 0: OpenMP default
};

RunReport new_report(const Context& ctx, std::string command) {
  RunReport r;
  r.command = std::move(command);
  r.arguments = ctx.arguments;
  r.tool_version = kVersion;
  r.generated_at = utc_timestamp();
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadParameter, path.string() + ": " + e.what());
  }
}

std::vector<fs::path> input_images(const std::string& dir) {
  std::vector<fs::path> files = list_images(dir);
  if (files.empty()) throw Error(Errc::FileNotFound, "no images found in " + dir);
  return files;
}

// Runs `fn(i)` for every index on the worker pool; failures are recorded
// per item instead of aborting the batch.
template <typename Fn>
std::vector<std::optional<std::string>> for_each_item(std::size_t count, Fn fn) {
  std::vector<std::optional<std::string>> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  return errors;
}

int report_failures(const std::vector<std::optional<std::string>>& errors, const std::vector<fs::path>& files) {
  int failed = 0;
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) {
      std::cerr << files[i].string() << ": " << *errors[i] << "\n";
      ++failed;
    }
  return failed;
}

std::string relative_to(const fs::path& target, const fs::path& base_dir) {
  const fs::path rel = fs::relative(fs::absolute(target), fs::absolute(base_dir));
  return rel.empty() ? fs::absolute(target).string() : rel.string();
}

// ---- keygen / register / corpus ----

void add_keygen(CLI::App& app, Context&, int& status) {
  auto* cmd = app.add_subcommand("keygen", "Write a new random 128-bit codec key");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--out", *out, "Key file to create (never overwritten)")->required();
  cmd->callback([out, &status] {
    write_key_file(*out, random_key());
    std::cout << "wrote key " << *out << "\n";
    status = kExitOk;
  });
}

void add_register(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string artist, role = "unauthorized", payload, method = "dwt-dct-svd", key, notes, record_id;
    std::optional<double> strength;
    int redundancy = kDefaultRedundancy, length = 32;
    bool random_payload = false, allow_duplicate = false, inline_key = false;
    std::uint64_t seed = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("register", "Add a watermark record to the registry");
  cmd->add_option("--artist", o->artist, "Artist id")->required();
  cmd->add_option("--role", o->role, "authorized | unauthorized")->check(CLI::IsMember({"authorized", "unauthorized"}));
  auto* pay = cmd->add_option("--payload", o->payload, "Payload as hex, or 0b followed by bits");
  cmd->add_flag("--random-payload", o->random_payload, "Draw a random payload of --payload-length bits")->excludes(pay);
  cmd->add_option("--payload-length", o->length, "Bits for --random-payload")->check(CLI::IsMember({16, 32, 64, 128}));
  cmd->add_option("--seed", o->seed, "Seed for --random-payload (0: from the system)");
  cmd->add_option("--method", o->method)->check(CLI::IsMember({"dwt-dct", "dwt-dct-svd"}));
  cmd->add_option("--key", o->key, "Key file")->required();
  cmd->add_option("--strength", o->strength);
  cmd->add_option("--redundancy", o->redundancy);
  cmd->add_option("--notes", o->notes);
  cmd->add_option("--record-id", o->record_id, "Explicit record id (default: random)");
  cmd->add_flag("--allow-duplicate", o->allow_duplicate, "Allow a second record for the same artist and role");
  cmd->add_flag("--insecure-inline-key", o->inline_key, "Store the key itself in the registry");
  cmd->callback([o, &ctx, &status] {
    RegistryRecord rec;
    rec.record_id = o->record_id;
    rec.artist_id = o->artist;
    const PayloadRole role = parse_payload_role(o->role);
    if (o->random_payload) {
      std::uint64_t seed = o->seed;
      if (seed == 0) std::memcpy(&seed, random_key().bytes.data(), sizeof seed);
      Rng rng(seed);
      BitVector bits(static_cast<std::size_t>(o->length));
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
      rec.payload = WatermarkPayload(bits, role);
    } else if (!o->payload.empty()) {
      rec.payload = WatermarkPayload::parse(o->payload, role);
    } else {
      throw CLI::ValidationError("register", "one of --payload or --random-payload is required");
    }
    rec.codec.method = parse_method(o->method);
    rec.codec.key = read_key_file(o->key);
    rec.codec.strength = o->strength;
    rec.codec.redundancy = o->redundancy;
    rec.codec.payload_length = rec.payload.length();
    if (!o->inline_key) rec.key_file = relative_to(o->key, fs::absolute(ctx.registry).parent_path());
    rec.notes = o->notes;
    const std::string id = registry_register(ctx.registry, rec, {o->allow_duplicate, o->inline_key});
    std::cout << id << "\n";
    status = kExitOk;
  });
}

void add_corpus(CLI::App& app, Context&, int& status) {
  struct Opts {
    std::string out;
    int count = 20, width = 512, height = 512;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("corpus", "Write a synthetic natural-image corpus as PNG");
  cmd->add_option("--out", o->out)->required();
  cmd->add_option("--count", o->count)->check(CLI::PositiveNumber);
  cmd->add_option("--width", o->width)->check(CLI::Range(kMinWatermarkEdge, 8192));
  cmd->add_option("--height", o->height)->check(CLI::Range(kMinWatermarkEdge, 8192));
  cmd->add_option("--seed", o->seed);
  cmd->callback([o, &status] {
    fs::create_directories(o->out);
    for_each_item(static_cast<std::size_t>(o->count), [&](std::size_t i) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%04zu.png", i);
      save_image(synth_natural_image(o->width, o->height, Rng::mix(o->seed, i)), fs::path(o->out) / name);
    });
    std::cout << "wrote " << o->count << " images to " << o->out << "\n";
    status = kExitOk;
  });
}

// ---- embed / extract / attack ----

struct CodecArgs {
  std::string record, payload, method = "dwt-dct-svd", key;
  std::optional<double> strength;
  std::optional<int> redundancy;
};

// Resolve codec configuration and payload from a registry record or flags.
std::pair<CodecConfig, WatermarkPayload> resolve_codec(const CodecArgs& a, const Context& ctx) {
  if (!a.record.empty()) {
    RegistryRecord rec = registry_get(ctx.registry, a.record);
    if (a.strength) rec.codec.strength = a.strength;
    if (a.redundancy) rec.codec.redundancy = *a.redundancy;
    return {rec.codec, rec.payload};
  }
  if (a.payload.empty() || a.key.empty())
    throw CLI::ValidationError("codec", "give --record, or both --payload and --key");
  CodecConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.key = read_key_file(a.key);
  cfg.strength = a.strength;
  if (a.redundancy) cfg.redundancy = *a.redundancy;
  WatermarkPayload p = WatermarkPayload::parse(a.payload);
  cfg.payload_length = p.length();
  return {cfg, p};
}

void add_codec_options(CLI::App* cmd, CodecArgs& a) {
  auto* rec = cmd->add_option("--record", a.record, "Registry record id");
  cmd->add_option("--payload", a.payload, "Payload as hex, or 0b followed by bits")->excludes(rec);
  cmd->add_option("--method", a.method)->check(CLI::IsMember({"dwt-dct", "dwt-dct-svd"}))->excludes(rec);
  cmd->add_option("--key", a.key, "Key file")->excludes(rec);
  cmd->add_option("--strength", a.strength);
  cmd->add_option("--redundancy", a.redundancy);
}

std::string output_name(const fs::path& in) { return in.stem().string() + ".png"; }

void add_embed(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string in, out, report;
    CodecArgs codec;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("embed", "Watermark every image in a directory");
  cmd->add_option("--in", o->in)->required();
  cmd->add_option("--out", o->out)->required();
  cmd->add_option("--report", o->report, "Manifest path (default: <out>/manifest.json)");
  add_codec_options(cmd, o->codec);
  cmd->callback([o, &ctx, &status] {
    const std::vector<fs::path> files = input_images(o->in);
    const auto [cfg, payload] = resolve_codec(o->codec, ctx);
    fs::create_directories(o->out);
    RunReport rep = new_report(ctx, "embed");
    rep.images.resize(files.size());
    const auto errors = for_each_item(files.size(), [&](std::size_t i) {
      ImageResult& r = rep.images[i];
      r.path = files[i].string();
      r.sha256 = sha256_file(files[i]);
      const EmbedResult e = embed(load_image(files[i]), payload, cfg);
      const fs::path dst = fs::path(o->out) / output_name(files[i]);
      save_image(e.watermarked, dst);
      r.output_path = dst.string();
      r.output_sha256 = sha256_file(dst);
      r.psnr = e.stats.psnr;
    });
    for (std::size_t i = 0; i < files.size(); ++i) {
      rep.inputs.push_back({files[i].string(), rep.images[i].sha256});
      if (errors[i]) rep.images[i].error = errors[i];
    }
    write_json(o->report.empty() ? fs::path(o->out) / "manifest.json" : fs::path(o->report), to_json(rep));
    const int failed = report_failures(errors, files);
    double min_psnr = INFINITY;
    for (const ImageResult& r : rep.images)
      if (r.psnr) min_psnr = std::min(min_psnr, *r.psnr);
    std::cout << "embedded " << files.size() - failed << "/" << files.size() << " images, min PSNR " << min_psnr << " dB\n";
    status = failed ? kExitData : kExitOk;
  });
}

void add_extract(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string in, out;
    CodecArgs codec;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("extract", "Extract and score every image in a directory");
  cmd->add_option("--in", o->in)->required();
  cmd->add_option("--out", o->out, "Run report (JSON)")->required();
  add_codec_options(cmd, o->codec);
  cmd->callback([o, &ctx, &status] {
    const std::vector<fs::path> files = input_images(o->in);
    const auto [cfg, payload] = resolve_codec(o->codec, ctx);
    RunReport rep = new_report(ctx, "extract");
    rep.images.resize(files.size());
    const auto errors = for_each_item(files.size(), [&](std::size_t i) {
      ImageResult& r = rep.images[i];
      r.path = files[i].string();
      r.sha256 = sha256_file(files[i]);
      const BitAccuracy acc = bit_accuracy(extract(load_image(files[i]), cfg).bits, payload);
      r.correct_bits = acc.correct_bits;
      r.n_bits = acc.total_bits;
    });
    AccuracySampleSet samples;
    samples.n_bits = payload.length();
    for (std::size_t i = 0; i < files.size(); ++i) {
      rep.inputs.push_back({files[i].string(), rep.images[i].sha256});
      if (errors[i]) rep.images[i].error = errors[i];
      else samples.samples.push_back(*rep.images[i].correct_bits);
    }
    rep.provenance.push_back({"extraction", "measured"});
    if (!samples.samples.empty()) {
      const SampleSummary s = summary(samples);
      std::printf("images %zu  avg(bits) %.2f  best(bits) %d  mean acc %.4f\n", samples.size(), s.avg_bits, s.best_bits,
                  s.avg_bits / samples.n_bits);
      rep.samples = samples;
    }
    write_json(o->out, to_json(rep));
    status = report_failures(errors, files) ? kExitData : kExitOk;
  });
}

void add_attack(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string in, out, spec, report;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("attack", "Apply an attack to every image in a directory");
  cmd->add_option("--in", o->in)->required();
  cmd->add_option("--out", o->out)->required();
  cmd->add_option("--spec", o->spec, "e.g. jpeg:q=75, rotation:deg=1")->required();
  cmd->add_option("--seed", o->seed);
  cmd->add_option("--report", o->report, "Manifest path (default: <out>/manifest.json)");
  cmd->callback([o, &ctx, &status] {
    const std::vector<fs::path> files = input_images(o->in);
    AttackSpec spec = AttackSpec::parse(o->spec);
    if (o->seed) spec.seed = o->seed;
    spec.validate();
    fs::create_directories(o->out);
    RunReport rep = new_report(ctx, "attack");
    if (spec.seed) rep.seeds.push_back(*spec.seed);
    rep.images.resize(files.size());
    const auto errors = for_each_item(files.size(), [&](std::size_t i) {
      ImageResult& r = rep.images[i];
      r.path = files[i].string();
      r.sha256 = sha256_file(files[i]);
      const AttackedImage a = apply_attack(load_image(files[i]), spec);
      const fs::path dst = fs::path(o->out) / output_name(files[i]);
      save_image(a.image, dst);
      r.output_path = dst.string();
      r.output_sha256 = sha256_file(dst);
      r.psnr = a.psnr_vs_source;
    });
    for (std::size_t i = 0; i < files.size(); ++i) {
      rep.inputs.push_back({files[i].string(), rep.images[i].sha256});
      if (errors[i]) rep.images[i].error = errors[i];
    }
    write_json(o->report.empty() ? fs::path(o->out) / "manifest.json" : fs::path(o->report), to_json(rep));
    const int failed = report_failures(errors, files);
    std::cout << "attacked " << files.size() - failed << "/" << files.size() << " images with " << spec.to_string() << "\n";
    status = failed ? kExitData : kExitOk;
  });
}

// ---- simulate ----

double parse_mix(const std::string& text) {
  std::string v = text;
  if (v.rfind("p=", 0) == 0) v = v.substr(2);
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw CLI::ValidationError("--mix", "expected p=<proportion>, got '" + text + "'");
  return p;
}

void add_simulate(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string preset, mix, clean = "t1-artist-clean", out, degrade, in;
    int n = 1000;
    std::uint64_t seed = 1;
    bool two_stage = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("simulate", "Draw channel samples, or surrogate-degrade a directory");
  auto* pre = cmd->add_option("--preset", o->preset, "Channel preset id");
  cmd->add_option("--n", o->n, "Number of samples")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o->seed);
  cmd->add_option("--mix", o->mix, "Watermarked proportion, p=<value>")->needs(pre);
  cmd->add_option("--clean", o->clean, "Clean preset for --mix");
  cmd->add_flag("--two-stage", o->two_stage, "Apply a second fine-tuning round to the preset");
  auto* deg = cmd->add_option("--degrade", o->degrade, "mild | standard | harsh")
                  ->check(CLI::IsMember({"mild", "standard", "harsh"}))
                  ->excludes(pre);
  cmd->add_option("--in", o->in, "Input directory for --degrade")->needs(deg);
  cmd->add_option("--out", o->out, "samples.json, or output directory for --degrade")->required();
  cmd->callback([o, &ctx, &status] {
    if (!o->degrade.empty()) {
      if (o->in.empty()) throw CLI::ValidationError("--degrade", "needs --in DIR");
      const std::vector<fs::path> files = input_images(o->in);
      const Severity sev = parse_severity(o->degrade);
      fs::create_directories(o->out);
      RunReport rep = new_report(ctx, "simulate");
      rep.seeds.push_back(o->seed);
      rep.provenance.push_back({std::string("surrogate-degrade:") + o->degrade, "user"});
      rep.images.resize(files.size());
      const auto errors = for_each_item(files.size(), [&](std::size_t i) {
        ImageResult& r = rep.images[i];
        r.path = files[i].string();
        r.sha256 = sha256_file(files[i]);
        const ImageBuffer src = load_image(files[i]);
        const ImageBuffer dst_img = surrogate_degrade(src, sev, Rng::mix(o->seed, i));
        const fs::path dst = fs::path(o->out) / output_name(files[i]);
        save_image(dst_img, dst);
        r.output_path = dst.string();
        r.output_sha256 = sha256_file(dst);
        r.psnr = psnr(src, dst_img);
      });
      for (std::size_t i = 0; i < files.size(); ++i) {
        rep.inputs.push_back({files[i].string(), rep.images[i].sha256});
        if (errors[i]) rep.images[i].error = errors[i];
      }
      write_json(fs::path(o->out) / "manifest.json", to_json(rep));
      const int failed = report_failures(errors, files);
      std::cout << "degraded " << files.size() - failed << "/" << files.size() << " images (" << o->degrade << ")\n";
      status = failed ? kExitData : kExitOk;
      return;
    }
    if (o->preset.empty()) throw CLI::ValidationError("simulate", "give --preset or --degrade");
    ChannelModel model = preset(o->preset);
    std::vector<ProvenanceTag> prov{{o->preset, std::string(to_string(model.provenance))}};
    if (o->two_stage) {
      model = two_stage(model);
      prov.push_back({"two-stage", std::string(to_string(model.provenance))});
    }
    AccuracySampleSet s;
    if (!o->mix.empty()) {
      const ChannelModel clean = preset(o->clean);
      prov.push_back({o->clean, std::string(to_string(clean.provenance))});
      s = sample_accuracies(mix(model, clean, parse_mix(o->mix)), o->n, o->seed);
    } else {
      s = sample_accuracies(model, o->n, o->seed);
    }
    Json j = to_json(s);
    Json pj = Json::array();
    for (const ProvenanceTag& p : prov) pj.push_back({{"source", p.source}, {"provenance", p.provenance}});
    j["provenance"] = pj;
    write_json(o->out, j);
    const SampleSummary sum = summary(s);
    std::printf("%d samples  avg(bits) %.2f  best(bits) %d\n", o->n, sum.avg_bits, sum.best_bits);
    status = kExitOk;
  });
}

// ---- verify ----

void print_verdict(const std::string& label, const VerificationVerdict& v) {
  std::printf("%s\n", label.c_str());
  std::printf("  samples %lld  avg(bits) %.2f  best(bits) %d\n", static_cast<long long>(v.sample_count), v.avg_bits,
              v.best_bits);
  std::printf("  p_mean %.3g  p_max %.3g", v.p_mean, v.p_max);
  if (v.p_ks) std::printf("  p_ks %.3g", *v.p_ks);
  std::printf("  alpha %.3g\n", v.alpha_used);
  TableRow r5{label, v.histogram_5bin, v.avg_bits, v.best_bits};
  TableRow r10{label, v.histogram_10bin, v.avg_bits, v.best_bits};
  std::istringstream t5(table_csv(std::span(&r5, 1), Binning::Five)), t10(table_csv(std::span(&r10, 1), Binning::Ten));
  for (std::string line; std::getline(t5, line);) std::printf("  %s\n", line.c_str());
  for (std::string line; std::getline(t10, line);) std::printf("  %s\n", line.c_str());
  std::printf("  decision: %s\n", std::string(to_string(v.decision)).c_str());
}

std::vector<ProvenanceTag> provenance_of(const Json& samples_doc) {
  std::vector<ProvenanceTag> out;
  if (samples_doc.contains("provenance"))
    for (const Json& p : samples_doc.at("provenance")) out.push_back({p.at("source"), p.at("provenance")});
  return out;
}

void add_verify(CLI::App& app, Context& ctx, int& status) {
  struct Opts {
    std::string samples, in, null_kind = "chance", reference, out, report;
    std::vector<std::string> records;
    double alpha = kDefaultAlpha, rho = kDefaultRho;
    bool fail_on_theft = false;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("verify", "Decide whether suspect outputs carry an artist's watermark");
  auto* smp = cmd->add_option("--samples", o->samples, "samples.json");
  auto* in = cmd->add_option("--in", o->in, "Directory of suspect images")->excludes(smp);
  cmd->add_option("--record", o->records, "Registry record id; repeat for multi-artist verification")->needs(in);
  cmd->add_option("--null", o->null_kind, "chance | reference")->check(CLI::IsMember({"chance", "reference"}));
  cmd->add_option("--reference", o->reference, "samples.json of known-clean outputs (implies --null reference)");
  cmd->add_option("--rho", o->rho, "Overdispersion of the chance null")->check(CLI::Range(0.0, 0.99));
  cmd->add_option("--alpha", o->alpha)->check(CLI::Range(1e-300, 0.5));
  cmd->add_flag("--fail-on-theft", o->fail_on_theft, "Exit 3 when theft is detected");
  cmd->add_option("--out", o->out, "verdict.json")->required();
  cmd->add_option("--report", o->report, "Also write a full run report");
  cmd->callback([o, &ctx, &status] {
    if (o->samples.empty() && o->in.empty()) throw CLI::ValidationError("verify", "give --samples or --in");
    if (!o->in.empty() && o->records.empty()) throw CLI::ValidationError("verify", "--in needs at least one --record");
    RunReport rep = new_report(ctx, "verify");

    std::optional<AccuracySampleSet> reference;
    if (!o->reference.empty()) {
      const Json rj = read_json(o->reference);
      reference = samples_from_json(rj.contains("report") ? rj.at("report").at("samples") : rj);
      rep.inputs.push_back({o->reference, sha256_file(o->reference)});
    } else if (o->null_kind == "reference") {
      throw CLI::ValidationError("--null", "reference null needs --reference FILE");
    }
    auto make_null = [&](int n_bits) {
      if (reference) return NullModel::from_reference(*reference);
      return NullModel::chance(n_bits, o->rho);
    };

    bool theft = false;
    if (!o->samples.empty()) {
      const Json sj = read_json(o->samples);
      const bool is_report = sj.contains("report");
      const AccuracySampleSet s = samples_from_json(is_report ? sj.at("report").at("samples") : sj);
      rep.inputs.push_back({o->samples, sha256_file(o->samples)});
      rep.provenance = is_report ? run_report_from_json(sj).provenance : provenance_of(sj);
      const NullModel null = make_null(s.n_bits);
      const VerificationVerdict v = detect(s, null, o->alpha);
      print_verdict(o->samples, v);
      for (const ProvenanceTag& p : rep.provenance)
        std::printf("  evidence: %s (%s)\n", p.source.c_str(), p.provenance.c_str());
      theft = v.decision == Decision::TheftDetected;
      rep.samples = s;
      rep.verdicts.push_back({o->samples, v, to_json(null), std::nullopt});
      write_json(o->out, to_json(v));
    } else {
      const std::vector<fs::path> files = input_images(o->in);
      std::vector<ImageBuffer> images(files.size());
      const auto errors = for_each_item(files.size(), [&](std::size_t i) { images[i] = load_image(files[i]); });
      if (report_failures(errors, files)) throw Error(Errc::CorruptImage, "could not load every suspect image");
      for (const fs::path& f : files) rep.inputs.push_back({f.string(), sha256_file(f)});
      std::vector<RegistryRecord> records;
      for (const std::string& id : o->records) records.push_back(registry_get(ctx.registry, id));
      const NullModel null = make_null(records.front().codec.payload_length);
      rep.provenance.push_back({"extraction", "measured"});
      if (records.size() == 1) {
        const AccuracySampleSet s = extract_accuracies(images, records[0].codec, records[0].payload);
        const VerificationVerdict v = extract_and_detect(images, records[0].codec, records[0].payload, null, o->alpha);
        print_verdict(records[0].record_id + " (" + records[0].artist_id + ")", v);
        theft = v.decision == Decision::TheftDetected;
        rep.samples = s;
        rep.verdicts.push_back({records[0].record_id, v, to_json(null), std::nullopt});
        write_json(o->out, to_json(v));
      } else {
        Json out = Json::object();
        for (auto& [id, outcome] : multi_artist_verify(images, records, null, o->alpha)) {
          Json e;
          e["artist_id"] = outcome.artist_id;
          e["verdict"] = outcome.verdict ? to_json(*outcome.verdict) : Json(nullptr);
          e["error"] = outcome.error.empty() ? Json(nullptr) : Json(outcome.error);
          out[id] = e;
          if (outcome.verdict) {
            print_verdict(id + " (" + outcome.artist_id + ")", *outcome.verdict);
            theft = theft || outcome.flagged();
          } else {
            std::printf("%s (%s)\n  error: %s\n", id.c_str(), outcome.artist_id.c_str(), outcome.error.c_str());
          }
          rep.verdicts.push_back({id, outcome.verdict, to_json(null),
                                  outcome.error.empty() ? std::nullopt : std::optional(outcome.error)});
        }
        write_json(o->out, out);
      }
    }
    if (!o->report.empty()) write_json(o->report, to_json(rep));
    status = theft && o->fail_on_theft ? kExitTheft : kExitOk;
  });
}

// ---- report ----

void add_report(CLI::App& app, Context&, int& status) {
  struct Opts {
    std::string run, format = "csv", binning = "five", out, label;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("report", "Render a run report, samples or verdict file as a table or plot data");
  cmd->add_option("--run", o->run, "Run report, samples.json or verdict.json")->required();
  cmd->add_option("--format", o->format)->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--binning", o->binning)->check(CLI::IsMember({"five", "ten"}));
  cmd->add_option("--label", o->label, "Row label (default: the evidence source)");
  cmd->add_option("--seed", o->seed, "Seed for the power-curve resampling");
  cmd->add_option("--out", o->out, "Output file (default: stdout)");
  cmd->callback([o, &status] {
    const Json doc = read_json(o->run);
    const Binning binning = parse_binning(o->binning);
    std::optional<AccuracySampleSet> samples;
    std::vector<TableRow> rows;
    std::string label = o->label;
    if (doc.contains("report")) {
      const RunReport r = run_report_from_json(doc);
      samples = r.samples;
      if (label.empty()) label = r.provenance.empty() ? r.command : r.provenance.front().source;
      if (!samples)
        for (const VerdictEntry& v : r.verdicts)
          if (v.verdict)
            rows.push_back({v.label, binning == Binning::Five ? v.verdict->histogram_5bin : v.verdict->histogram_10bin,
                            v.verdict->avg_bits, v.verdict->best_bits});
    } else if (doc.contains("samples")) {
      samples = samples_from_json(doc);
      if (label.empty()) {
        const auto prov = provenance_of(doc);
        label = prov.empty() ? "samples" : prov.front().source;
      }
    } else if (doc.contains("histogram_5bin")) {
      const VerificationVerdict v = verdict_from_json(doc);
      rows.push_back({label.empty() ? "verdict" : label,
                      binning == Binning::Five ? v.histogram_5bin : v.histogram_10bin, v.avg_bits, v.best_bits});
    } else {
      throw Error(Errc::BadParameter, o->run + " is not a run report, samples or verdict document");
    }
    if (samples) rows.insert(rows.begin(), table_row(label, *samples, binning));
    if (rows.empty()) throw Error(Errc::EmptySampleSet, o->run + " holds no samples or verdicts");

    std::string text;
    if (o->format == "csv") {
      text = table_csv(rows, binning);
    } else {
      Json j;
      if (samples) {
        j = plot_data(*samples, NullModel::chance(samples->n_bits), kDefaultAlpha, o->seed);
      } else {
        Json series = Json::array();
        for (const TableRow& r : rows) series.push_back({{"label", r.label}, {"counts", r.bins}});
        j["histograms"] = series;
      }
      j["rows"] = Json::array();
      for (const TableRow& r : rows)
        j["rows"].push_back({{"label", r.label}, {"bins", r.bins}, {"avg_bits", r.avg_bits}, {"best_bits", r.best_bits}});
      text = j.dump(2) + "\n";
    }
    if (o->out.empty()) std::cout << text;
    else write_text(o->out, text);
    status = kExitOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  for (int i = 1; i < argc; ++i) ctx.arguments.emplace_back(argv[i]);
  int status = kExitOk;

  CLI::App app{"mimicmark: watermark artworks and verify mimicry fine-tuning"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.add_option("--registry", ctx.registry, "Registry store (JSON lines)");
  app.add_option("--jobs", ctx.jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  add_keygen(app, ctx, status);
  add_register(app, ctx, status);
  add_corpus(app, ctx, status);
  add_embed(app, ctx, status);
  add_extract(app, ctx, status);
  add_attack(app, ctx, status);
  add_simulate(app, ctx, status);
  add_verify(app, ctx, status);
  add_report(app, ctx, status);
  app.parse_complete_callback([&ctx] {
    if (ctx.jobs > 0) omp_set_num_threads(ctx.jobs);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return status;
}
