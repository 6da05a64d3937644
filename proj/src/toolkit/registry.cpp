#include "mimicmark/registry.hpp"

#include <fcntl.h>
#include <sodium.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mimicmark/error.hpp"

namespace mimicmark {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void init_sodium() {
  if (sodium_init() < 0) throw Error(Errc::IoError, "libsodium failed to initialize");
}

std::string random_hex(std::size_t bytes) {
  init_sodium();
  std::vector<unsigned char> buf(bytes);
  randombytes_buf(buf.data(), buf.size());
  std::string out(bytes * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), buf.data(), buf.size());
  out.pop_back();
  return out;
}

// Holds an exclusive flock on `<store>.lock` for its lifetime.
class StoreLock {
 public:
  explicit StoreLock(const fs::path& store) {
    const std::string lock_path = store.string() + ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(Errc::IoError, "cannot open lock file " + lock_path);
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw Error(Errc::IoError, "cannot lock " + lock_path);
    }
  }
  ~StoreLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StoreLock(const StoreLock&) = delete;
  StoreLock& operator=(const StoreLock&) = delete;

 private:
  int fd_ = -1;
};

ordered_json to_json(const RegistryRecord& r, bool inline_key) {
  ordered_json codec;
  codec["method"] = std::string(to_string(r.codec.method));
  codec["strength"] = r.codec.strength ? ordered_json(*r.codec.strength) : ordered_json(nullptr);
  codec["payload_length"] = r.codec.payload_length;
  codec["redundancy"] = r.codec.redundancy;
  if (inline_key) codec["key"] = r.codec.key.to_hex();
  else codec["key_file"] = *r.key_file;

  ordered_json j;
  j["record_id"] = r.record_id;
  j["artist_id"] = r.artist_id;
  j["role"] = std::string(to_string(r.payload.role()));
  j["payload"] = r.payload.to_hex();
  j["codec"] = codec;
  j["created_at"] = r.created_at;
  j["notes"] = r.notes;
  j["signature"] = r.signature ? ordered_json(*r.signature) : ordered_json(nullptr);
  return j;
}

RegistryRecord from_json(const ordered_json& j) {
  RegistryRecord r;
  r.record_id = j.at("record_id").get<std::string>();
  r.artist_id = j.at("artist_id").get<std::string>();
  const PayloadRole role = parse_payload_role(j.at("role").get<std::string>());
  r.payload = WatermarkPayload::from_hex(j.at("payload").get<std::string>(), role);
  const ordered_json& c = j.at("codec");
  r.codec.method = parse_method(c.at("method").get<std::string>());
  if (c.contains("strength") && !c.at("strength").is_null()) r.codec.strength = c.at("strength").get<double>();
  r.codec.payload_length = c.at("payload_length").get<int>();
  r.codec.redundancy = c.at("redundancy").get<int>();
  if (c.contains("key")) {
    r.codec.key = SecretKey::from_hex(c.at("key").get<std::string>());
  } else {
    r.key_file = c.at("key_file").get<std::string>();
  }
  r.created_at = j.value("created_at", std::string{});
  r.notes = j.value("notes", std::string{});
  if (j.contains("signature") && !j.at("signature").is_null()) r.signature = j.at("signature").get<std::string>();
  if (r.payload.length() != r.codec.payload_length)
    throw Error(Errc::CorruptRecord, "payload length does not match codec payload_length");
  return r;
}

std::vector<std::string> read_lines(const fs::path& store) {
  std::vector<std::string> lines;
  std::error_code ec;
  if (!fs::exists(store, ec)) return lines;
  std::ifstream in(store);
  if (!in) throw Error(Errc::IoError, "cannot read registry " + store.string());
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Keys are not resolved here, so an unreadable key file only affects the
// records that are actually used.
std::vector<RegistryRecord> parse_store(const fs::path& store, const std::vector<std::string>& lines) {
  std::vector<RegistryRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json(ordered_json::parse(lines[i])));
    } catch (const std::exception& e) {
      throw Error(Errc::CorruptRecord, store.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

void resolve_key(RegistryRecord& r, const fs::path& store) {
  if (!r.key_file) return;
  const fs::path kp = fs::path(*r.key_file).is_absolute() ? fs::path(*r.key_file) : store.parent_path() / *r.key_file;
  r.codec.key = read_key_file(kp);
}

}  // namespace

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SecretKey random_key() {
  init_sodium();
  SecretKey k;
  randombytes_buf(k.bytes.data(), k.bytes.size());
  return k;
}

SecretKey read_key_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot read key file " + path.string());
  std::string hex;
  for (char ch; in.get(ch);)
    if (!std::isspace(static_cast<unsigned char>(ch))) hex.push_back(ch);
  return SecretKey::from_hex(hex);
}

void write_key_file(const fs::path& path, const SecretKey& key) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0600);
  if (fd < 0) throw Error(Errc::IoError, "cannot create key file " + path.string() + " (exists?)");
  const std::string text = key.to_hex() + "\n";
  const bool ok = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
  ::close(fd);
  if (!ok) throw Error(Errc::IoError, "short write to " + path.string());
}

std::string registry_register(const fs::path& store, RegistryRecord record, const RegisterOptions& options) {
  if (record.artist_id.empty()) throw Error(Errc::BadConfig, "artist_id must not be empty");
  record.codec.validate();
  if (record.payload.length() != record.codec.payload_length)
    throw Error(Errc::LengthMismatch, "payload length does not match codec payload_length");
  if (!options.inline_key && !record.key_file)
    throw Error(Errc::BadConfig, "a key file reference is required unless the key is stored inline");
  if (record.record_id.empty()) record.record_id = "rec-" + random_hex(8);
  if (record.created_at.empty()) record.created_at = utc_timestamp();

  StoreLock lock(store);
  const std::vector<std::string> lines = read_lines(store);
  for (const RegistryRecord& r : parse_store(store, lines)) {
    if (r.record_id == record.record_id) throw Error(Errc::DuplicateRecord, "record id " + r.record_id + " exists");
    if (!options.allow_duplicate && r.artist_id == record.artist_id && r.role() == record.role())
      throw Error(Errc::DuplicateRecord, "artist " + r.artist_id + " already has a " +
                                             std::string(to_string(r.role())) + " record (" + r.record_id + ")");
  }

  const fs::path tmp = store.string() + ".tmp-" + random_hex(6);
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
    for (const std::string& l : lines)
      if (l.find_first_not_of(" \t\r") != std::string::npos) out << l << '\n';
    out << to_json(record, options.inline_key).dump() << '\n';
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(Errc::IoError, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, store, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::IoError, "cannot replace " + store.string());
  }
  return record.record_id;
}

std::vector<RegistryRecord> registry_load(const fs::path& store) {
  std::vector<RegistryRecord> all = parse_store(store, read_lines(store));
  for (RegistryRecord& r : all) resolve_key(r, store);
  return all;
}

std::vector<RegistryRecord> registry_lookup(const fs::path& store, std::string_view artist_id) {
  std::vector<RegistryRecord> all = parse_store(store, read_lines(store)), out;
  for (auto it = all.rbegin(); it != all.rend(); ++it)
    if (it->artist_id == artist_id) out.push_back(std::move(*it));
  if (out.empty()) throw Error(Errc::NotFound, "no records for artist '" + std::string(artist_id) + "'");
  for (RegistryRecord& r : out) resolve_key(r, store);
  return out;
}

RegistryRecord registry_get(const fs::path& store, std::string_view record_id) {
  for (RegistryRecord& r : parse_store(store, read_lines(store)))
    if (r.record_id == record_id) {
      resolve_key(r, store);
      return std::move(r);
    }
  throw Error(Errc::NotFound, "no record '" + std::string(record_id) + "' in " + store.string());
}

}  // namespace mimicmark
