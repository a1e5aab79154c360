#include "curelite/workflow/levels.hpp"

#include <algorithm>

#include "curelite/common/error.hpp"
#include "curelite/engine/evaluate.hpp"

namespace curelite::workflow {

CuratorLevel resolve_level(const cureql::TypedLevel& level, std::size_t index, engine::Database& db,
                           const std::map<std::size_t, eist::Row>& outer, std::optional<eist::Row> group_key) {
  const auto snap = db.snapshot();
  std::vector<eist::Row> rows;
  if (level.kind == cureql::TypedLevel::Kind::Relation) {
    const auto& rel = snap->relation(level.name);
    for (const auto* part : {&rel.facts(), &rel.predict()}) {
      for (const auto& t : *part) rows.push_back(t.values);
    }
  } else {
    rows = engine::level_rows(*level.query, *snap, outer);
  }

  CuratorLevel out;
  out.index = index;
  out.origin = level.kind == cureql::TypedLevel::Kind::Query ? "query" : level.name;
  out.group_key = std::move(group_key);
  for (const auto& row : rows) {
    std::vector<std::string> key;
    bool complete = true;
    for (std::size_t c : level.identity_columns) {
      if (eist::is_cnull(row[c])) complete = false;
      key.push_back(eist::render_value(row[c]));
    }
    if (!complete) continue;
    auto id = snap->sources.find(key);
    out.members.push_back(id ? *id : db.register_source(key));
  }
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  if (out.members.empty()) {
    throw Error(ErrorCode::EmptyLevel, "curator level " + std::to_string(index) + " (" + out.origin + ") has no members");
  }
  return out;
}

std::vector<CuratorLevel> resolve_levels(const cureql::TypedSourceClause& clause, engine::Database& db,
                                         const std::map<std::size_t, eist::Row>& outer,
                                         std::optional<eist::Row> group_key) {
  std::vector<CuratorLevel> out;
  for (std::size_t i = 0; i < clause.levels.size(); ++i) {
    out.push_back(resolve_level(clause.levels[i], i + 1, db, outer, group_key));
  }
  return out;
}

}  // namespace curelite::workflow
