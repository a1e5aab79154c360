#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curelite/cureql/validator.hpp"
#include "curelite/engine/database.hpp"

namespace curelite::engine {

struct PlanNode {
  enum class Kind { Scan, Select, Join, Project, GroupPartition };

  Kind kind = Kind::Scan;
  std::string relation;  // Scan
  std::size_t binding = 0;  // Scan
  /// Select: filter conditions. Join: equality conditions across the inputs
  /// (empty means cross product).
  std::vector<cureql::TypedComparison> predicates;
  std::vector<cureql::BoundColumn> columns;  // Project, GroupPartition
  std::vector<PlanNode> children;

  /// Operator shape, e.g. `Project(Select(Scan Interaction))`.
  std::string shape() const;
};

/// A CNULL cell awaiting a curator value.
struct CellFillTarget {
  std::string relation;
  eist::Row row;
  std::size_t column = 0;

  friend bool operator==(const CellFillTarget&, const CellFillTarget&) = default;
};

struct Collection {
  std::optional<cureql::ExtractorDecl> extractor;
  std::optional<std::string> input;
  /// Crowd-enabled relation that receives extracted or solicited rows; empty
  /// when the query touches no crowd relation.
  std::string target_relation;
  std::size_t target_binding = 0;
  bool solicit_rows = false;  // crowd table and no extractor
  std::vector<CellFillTarget> cell_fills;
  /// Global or per-group curator hierarchy; absent means the open crowd.
  std::optional<cureql::TypedSourceClause> levels;
  bool per_group = false;
  std::vector<cureql::BoundColumn> group_by;
  std::optional<cureql::LimitClause> limits;
};

struct Plan {
  cureql::TypedSelect query;
  cureql::QueryKind kind = cureql::QueryKind::PureEist;
  std::optional<Collection> collection;
  PlanNode evaluation;
};

/// Two-phase plan. A query without USING/SOURCE still gets a collection phase
/// (cell fills only) when it touches CNULL cells of crowd columns, and is then
/// classified as a CureQL query. Throws ExtractorMissing.
Plan plan(const cureql::TypedSelect& query, const DatabaseState& db);

/// LIMIT amounts after binding placeholders such as `t` and `k`.
struct Limits {
  std::optional<std::int64_t> time;
  std::optional<std::int64_t> rows;

  bool indefinite() const { return !time && !rows; }
  friend bool operator==(const Limits&, const Limits&) = default;
};

/// Throws InvalidArgument for an unbound placeholder or a non-positive value.
Limits bind_limits(const std::optional<cureql::LimitClause>& clause, const std::map<std::string, std::int64_t>& params);

}  // namespace curelite::engine
