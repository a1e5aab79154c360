#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "curelite/cureql/catalog.hpp"
#include "curelite/cureql/validator.hpp"
#include "curelite/eist/reliability.hpp"
#include "curelite/eist/relation.hpp"
#include "curelite/eist/source.hpp"

namespace curelite::engine {

/// Immutable database contents. Relations are shared between versions and
/// copied only when written.
struct DatabaseState {
  cureql::Catalog catalog;
  std::map<std::string, std::shared_ptr<const eist::EistRelation>> relations;
  eist::SourceRegistry sources;
  std::uint64_t version = 0;

  const eist::EistRelation& relation(const std::string& name) const;  // throws UnknownRelation
  bool operator==(const DatabaseState& other) const;
};

struct Snapshot {
  std::shared_ptr<const DatabaseState> state;

  std::uint64_t id() const { return state->version; }
  const DatabaseState& operator*() const { return *state; }
  const DatabaseState* operator->() const { return state.get(); }
};

/// Effect of one write.
struct WriteResult {
  std::vector<eist::ResolutionRecord> records;
  std::vector<std::string> warnings;
  std::optional<eist::PredictEffect> predict_effect;
};

/// Single-writer database. Every write publishes a new version; readers keep
/// working on the snapshot they took.
class Database {
 public:
  Database();
  explicit Database(DatabaseState initial);

  Snapshot snapshot() const;
  /// A recently published version. Throws SnapshotGone once it was evicted.
  Snapshot snapshot(std::uint64_t id) const;

  void create_table(const std::string& name, eist::Schema schema);
  void create_view(const std::string& name, cureql::SelectStmt query);
  void register_extractor(cureql::ExtractorDecl decl);

  eist::SourceId register_source(std::vector<std::string> key_values, eist::SourceKind kind = eist::SourceKind::Curator,
                                 std::optional<double> initial = std::nullopt);
  void set_override(eist::SourceId id, std::optional<double> value);

  /// Adds a fact, archives key-matching candidates and rescores their sources.
  WriteResult insert_fact(const std::string& relation, eist::Row values);
  WriteResult insert_predict(const std::string& relation, eist::Row values, const std::vector<eist::SourceId>& contributors);
  bool fill_cell(const std::string& relation, const eist::Row& original, std::size_t column, eist::Value value,
                 const std::vector<eist::SourceId>& contributors);

  /// Applies a validated CREATE or INSERT. SELECT is rejected.
  WriteResult execute(const cureql::TypedStatement& stmt);

  /// Replaces the whole state (loading from storage).
  void reset(DatabaseState state);

  const eist::CredibilityParams& credibility() const { return credibility_; }

 private:
  template <typename F>
  auto write(F&& f);

  mutable std::mutex mutex_;
  std::shared_ptr<const DatabaseState> state_;
  std::deque<std::shared_ptr<const DatabaseState>> history_;
  eist::CredibilityParams credibility_;
};

/// Value-existence check for the relation's foreign keys; one warning per
/// missing reference.
std::vector<std::string> foreign_key_warnings(const DatabaseState& db, const std::string& relation,
                                              const eist::Row& values);

}  // namespace curelite::engine
