#include "curelite/engine/database.hpp"

#include <algorithm>

#include "curelite/common/error.hpp"

namespace curelite::engine {

namespace {

constexpr std::size_t kRetainedSnapshots = 32;

}  // namespace

const eist::EistRelation& DatabaseState::relation(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw Error(ErrorCode::UnknownRelation, "unknown relation '" + name + "'");
  return *it->second;
}

bool DatabaseState::operator==(const DatabaseState& other) const {
  if (!(catalog == other.catalog) || !(sources == other.sources)) return false;
  if (relations.size() != other.relations.size()) return false;
  for (const auto& [name, rel] : relations) {
    auto it = other.relations.find(name);
    if (it == other.relations.end() || !(*rel == *it->second)) return false;
  }
  return true;
}

std::vector<std::string> foreign_key_warnings(const DatabaseState& db, const std::string& relation,
                                              const eist::Row& values) {
  std::vector<std::string> out;
  const auto& schema = db.relation(relation).schema();
  for (const auto& fk : schema.foreign_keys()) {
    auto ref = db.relations.find(fk.referenced_relation);
    if (ref == db.relations.end()) {
      out.push_back("foreign key target '" + fk.referenced_relation + "' does not exist");
      continue;
    }
    const auto& target = *ref->second;
    // Each column is an independent value-existence reference.
    for (std::size_t i = 0; i < fk.columns.size() && i < fk.referenced_columns.size(); ++i) {
      auto col = schema.index_of(fk.columns[i]);
      auto ref_col = target.schema().index_of(fk.referenced_columns[i]);
      if (!col || !ref_col) continue;
      const auto& v = values[*col];
      if (eist::is_cnull(v)) continue;
      auto present = [&](const std::vector<eist::EistTuple>& part) {
        return std::any_of(part.begin(), part.end(), [&](const eist::EistTuple& t) { return t.values[*ref_col] == v; });
      };
      if (!present(target.facts()) && !present(target.predict())) {
        out.push_back(relation + "." + fk.columns[i] + " = '" + eist::render_value(v) + "' has no match in " +
                      fk.referenced_relation + "." + fk.referenced_columns[i]);
      }
    }
  }
  return out;
}

Database::Database() : Database(DatabaseState{}) {}

Database::Database(DatabaseState initial) {
  state_ = std::make_shared<const DatabaseState>(std::move(initial));
  history_.push_back(state_);
}

Snapshot Database::snapshot() const {
  std::lock_guard lock(mutex_);
  return Snapshot{state_};
}

Snapshot Database::snapshot(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  for (const auto& s : history_) {
    if (s->version == id) return Snapshot{s};
  }
  throw Error(ErrorCode::SnapshotGone, "snapshot " + std::to_string(id) + " is no longer retained");
}

template <typename F>
auto Database::write(F&& f) {
  std::lock_guard lock(mutex_);
  auto next = std::make_shared<DatabaseState>(*state_);
  next->version = state_->version + 1;
  if constexpr (std::is_void_v<decltype(f(*next))>) {
    f(*next);
    state_ = std::move(next);
    history_.push_back(state_);
    if (history_.size() > kRetainedSnapshots) history_.pop_front();
  } else {
    auto result = f(*next);
    state_ = std::move(next);
    history_.push_back(state_);
    if (history_.size() > kRetainedSnapshots) history_.pop_front();
    return result;
  }
}

void Database::reset(DatabaseState state) {
  std::lock_guard lock(mutex_);
  state.version = state_->version + 1;
  state_ = std::make_shared<const DatabaseState>(std::move(state));
  history_.push_back(state_);
  if (history_.size() > kRetainedSnapshots) history_.pop_front();
}

void Database::create_table(const std::string& name, eist::Schema schema) {
  write([&](DatabaseState& s) {
    if (s.catalog.has_name(name)) throw Error(ErrorCode::SchemaMismatch, "relation '" + name + "' already exists");
    s.catalog.relations.emplace(name, schema);
    s.relations.emplace(name, std::make_shared<const eist::EistRelation>(name, schema));
  });
}

void Database::create_view(const std::string& name, cureql::SelectStmt query) {
  write([&](DatabaseState& s) {
    if (s.catalog.has_name(name)) throw Error(ErrorCode::SchemaMismatch, "relation '" + name + "' already exists");
    s.catalog.views.emplace(name, std::move(query));
  });
}

void Database::register_extractor(cureql::ExtractorDecl decl) {
  write([&](DatabaseState& s) {
    // Extractor output is attributed to the tool as an ordinary source.
    s.sources.register_source({decl.name}, eist::SourceKind::Extractor);
    s.catalog.extractors[decl.name] = std::move(decl);
  });
}

eist::SourceId Database::register_source(std::vector<std::string> key_values, eist::SourceKind kind,
                                         std::optional<double> initial) {
  return write([&](DatabaseState& s) { return s.sources.register_source(std::move(key_values), kind, initial); });
}

void Database::set_override(eist::SourceId id, std::optional<double> value) {
  write([&](DatabaseState& s) { s.sources.set_override(id, value); });
}

namespace {

eist::EistRelation& mutable_relation(DatabaseState& s, const std::string& name) {
  auto it = s.relations.find(name);
  if (it == s.relations.end()) throw Error(ErrorCode::UnknownRelation, "unknown relation '" + name + "'");
  auto copy = std::make_shared<eist::EistRelation>(*it->second);
  it->second = copy;
  return *copy;
}

void check_contributors(const DatabaseState& s, const std::vector<eist::SourceId>& contributors) {
  for (auto id : contributors) {
    if (!id.is_truth() && !s.sources.contains(id)) {
      throw Error(ErrorCode::UnknownSource, "source " + std::to_string(id.value()) + " is not registered");
    }
  }
}

}  // namespace

WriteResult Database::insert_fact(const std::string& relation, eist::Row values) {
  return write([&](DatabaseState& s) {
    WriteResult out;
    out.warnings = foreign_key_warnings(s, relation, values);
    out.records = mutable_relation(s, relation).insert_fact(std::move(values));
    eist::update_reliabilities(out.records, s.sources, credibility_);
    return out;
  });
}

WriteResult Database::insert_predict(const std::string& relation, eist::Row values,
                                     const std::vector<eist::SourceId>& contributors) {
  return write([&](DatabaseState& s) {
    check_contributors(s, contributors);
    WriteResult out;
    out.warnings = foreign_key_warnings(s, relation, values);
    auto outcome = mutable_relation(s, relation).insert_predict(std::move(values), contributors);
    out.predict_effect = outcome.effect;
    out.records = std::move(outcome.records);
    eist::update_reliabilities(out.records, s.sources, credibility_);
    return out;
  });
}

bool Database::fill_cell(const std::string& relation, const eist::Row& original, std::size_t column, eist::Value value,
                         const std::vector<eist::SourceId>& contributors) {
  return write([&](DatabaseState& s) {
    check_contributors(s, contributors);
    return mutable_relation(s, relation).fill_cell(original, column, std::move(value), contributors);
  });
}

WriteResult Database::execute(const cureql::TypedStatement& stmt) {
  if (const auto* t = std::get_if<cureql::TypedCreateTable>(&stmt)) {
    create_table(t->name, t->schema);
    return {};
  }
  if (const auto* v = std::get_if<cureql::TypedCreateView>(&stmt)) {
    create_view(v->name, v->query);
    return {};
  }
  if (const auto* ins = std::get_if<cureql::TypedInsert>(&stmt)) {
    if (ins->target == cureql::InsertTarget::Facts) return insert_fact(ins->relation, ins->values);
    std::vector<eist::SourceId> ids;
    const auto snap = snapshot();
    for (const auto& name : ins->contributors) {
      auto id = snap->sources.find_by_name(name);
      if (!id) throw Error(ErrorCode::UnknownSource, "unknown source '" + name + "'");
      ids.push_back(*id);
    }
    return insert_predict(ins->relation, ins->values, ids);
  }
  throw Error(ErrorCode::InvalidArgument, "SELECT is evaluated, not executed");
}

}  // namespace curelite::engine
