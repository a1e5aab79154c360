#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curelite/eist/reliability.hpp"
#include "curelite/engine/plan.hpp"

namespace curelite::engine {

struct ResultRow {
  eist::Row values;
  eist::Lineage lineage;
  double p_reliability = 0;
  double f_reliability = 0;
  std::string provenance;
  std::optional<eist::Row> partition;  // GROUP BY values

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::string> partition_columns;
  std::vector<ResultRow> rows;  // sorted by values, then partition
  eist::ReliabilityMode mode = eist::ReliabilityMode::Probabilistic;
  std::uint64_t snapshot_id = 0;

  friend bool operator==(const ResultSet&, const ResultSet&) = default;
};

using Overrides = std::map<eist::SourceId, double>;

/// Runs the evaluation phase over Facts and Predict of the snapshot. Throws
/// UnknownOverrideSource or InvalidReliability for bad overrides.
ResultSet evaluate(const Plan& plan, const Snapshot& snapshot, eist::ReliabilityMode mode,
                   const Overrides& overrides = {});

/// evaluate() under temporary overrides; stored profiles are never touched.
ResultSet whatif(const Plan& plan, const Overrides& overrides, const Snapshot& snapshot, eist::ReliabilityMode mode);

/// `(Fred)|(Karen)` style rendering with source display names.
std::string provenance(const eist::Lineage& lineage, const eist::SourceRegistry& sources);

/// Plain rows of a curator-level query. `outer` supplies the row bound to each
/// outer FROM binding referenced by a correlated level.
std::vector<eist::Row> level_rows(const cureql::TypedSelect& query, const DatabaseState& db,
                                  const std::map<std::size_t, eist::Row>& outer = {});

/// Fixed-width text table: result columns, then lineage, p_reliability and
/// f_reliability.
std::string format_table(const ResultSet& result);

/// Shortest text for a reliability in [0,1].
std::string format_reliability(double r);

}  // namespace curelite::engine
