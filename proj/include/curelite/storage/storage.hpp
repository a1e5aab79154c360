#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curelite/engine/database.hpp"
#include "curelite/workflow/task.hpp"

namespace curelite::storage {

inline constexpr int kFormatVersion = 1;

/// Database directory layout:
///   meta                 format=1, n=<ordinary source count>
///   catalog              one CREATE statement per line, tables by name, then views
///   extractors           name, kind, location, requires_input
///   sources              ordinal, kind, key, reliability, confirmed, resolved, override
///   relations/<R>.tsv    section, key values, non-key values, lineage
///   tasks.jsonl          workflow state
///   journal.jsonl        mutations since the last save
///   lock                 held by the writing process
struct Stored {
  engine::DatabaseState db;
  workflow::WorkflowState workflow;
};

/// Canonical text: saving equal states gives identical bytes. Each file is
/// written beside its target and renamed into place. Clears the journal.
/// Throws IoFailure.
void save_db(const engine::DatabaseState& db, const workflow::WorkflowState& workflow, const std::filesystem::path& dir);

/// Rebuilds and re-checks every relation and profile. A missing or empty
/// directory is an empty database. Throws CorruptFile (with file and line),
/// VersionMismatch, InvariantViolation or IoFailure.
Stored load_db(const std::filesystem::path& dir);

/// Escaped comma-joined cell text; CNULL is `\N`.
std::string encode_values(const eist::Row& values);
/// Inverse of encode_values for the given column types. Throws CorruptFile.
eist::Row decode_values(std::string_view text, const std::vector<eist::BaseType>& types);

/// Append-only mutation log, one line per entry.
void append_journal(const std::filesystem::path& dir, const std::string& line);
std::vector<std::string> read_journal(const std::filesystem::path& dir);

/// Exclusive advisory lock on `<dir>/lock`; throws Locked when another
/// process holds it.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace curelite::storage
