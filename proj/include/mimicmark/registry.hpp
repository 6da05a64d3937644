#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mimicmark/codec.hpp"
#include "mimicmark/record.hpp"

namespace mimicmark {

struct RegisterOptions {
  bool allow_duplicate = false;  // permit a second record for the same (artist, role)
  bool inline_key = false;       // store the key itself instead of record.key_file
};

/// Appends `record` to the JSON-lines store. Writers serialize on a lock
/// file next to the store and replace it by write-temp-rename, so readers
/// never see a partial line. Fills in record_id and created_at when empty.
/// Returns the record id. Throws DuplicateRecord, BadConfig, IoError.
std::string registry_register(const std::filesystem::path& store, RegistryRecord record,
                              const RegisterOptions& options = {});

/// Every record in file order (oldest first). Key files are resolved
/// relative to the store's directory. A missing store is an empty registry.
/// Throws CorruptRecord naming the line, IoError.
std::vector<RegistryRecord> registry_load(const std::filesystem::path& store);

/// Records of one artist, newest first. Throws NotFound.
std::vector<RegistryRecord> registry_lookup(const std::filesystem::path& store, std::string_view artist_id);

/// Throws NotFound.
RegistryRecord registry_get(const std::filesystem::path& store, std::string_view record_id);

/// Key files hold the key as 32 hex digits (whitespace ignored).
SecretKey read_key_file(const std::filesystem::path& path);
/// Creates the file with owner-only permissions; refuses to overwrite.
void write_key_file(const std::filesystem::path& path, const SecretKey& key);
SecretKey random_key();

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ, or SOURCE_DATE_EPOCH when set.
std::string utc_timestamp();

}  // namespace mimicmark
