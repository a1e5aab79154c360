#pragma once

#include <map>
#include <optional>
#include <vector>

#include "curelite/engine/database.hpp"
#include "curelite/workflow/task.hpp"

namespace curelite::workflow {

/// Evaluates one curator level and projects its identity columns. Identities
/// not yet in the Curator Index are registered. `outer` binds the enclosing
/// query's FROM entries for a correlated level. Throws EmptyLevel.
CuratorLevel resolve_level(const cureql::TypedLevel& level, std::size_t index, engine::Database& db,
                           const std::map<std::size_t, eist::Row>& outer = {},
                           std::optional<eist::Row> group_key = std::nullopt);

std::vector<CuratorLevel> resolve_levels(const cureql::TypedSourceClause& clause, engine::Database& db,
                                         const std::map<std::size_t, eist::Row>& outer = {},
                                         std::optional<eist::Row> group_key = std::nullopt);

}  // namespace curelite::workflow
