#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "curelite/cureql/ast.hpp"
#include "curelite/cureql/catalog.hpp"
#include "curelite/cureql/diagnostic.hpp"
#include "curelite/eist/value.hpp"

namespace curelite::cureql {

/// A column of one of the query's own FROM bindings.
struct BoundColumn {
  std::size_t binding = 0;
  std::size_t attribute = 0;
  eist::BaseType type = eist::BaseType::String;
  std::string name;

  friend bool operator==(const BoundColumn&, const BoundColumn&) = default;
};

/// A column of the enclosing query's FROM binding (correlated level query).
struct OuterColumn {
  std::size_t binding = 0;
  std::size_t attribute = 0;
  eist::BaseType type = eist::BaseType::String;
  std::string name;

  friend bool operator==(const OuterColumn&, const OuterColumn&) = default;
};

using TypedOperand = std::variant<BoundColumn, OuterColumn, eist::Value>;

struct TypedComparison {
  TypedOperand lhs;
  CompareOp op = CompareOp::Eq;
  TypedOperand rhs;

  friend bool operator==(const TypedComparison&, const TypedComparison&) = default;
};

struct FromBinding {
  std::string relation;
  std::string alias;  // the tuple variable; the relation name when none was given
  eist::Schema schema;

  friend bool operator==(const FromBinding&, const FromBinding&) = default;
};

struct TypedSelect;

struct TypedLevel {
  enum class Kind { Relation, View, Query };

  Kind kind = Kind::Relation;
  std::string name;  // relation or view name; empty for an inline query
  std::shared_ptr<const TypedSelect> query;  // set for View and Query
  std::vector<std::string> output_columns;
  /// Positions in the level output whose values identify a curator.
  std::vector<std::size_t> identity_columns;
  bool correlated = false;
};

struct TypedSourceClause {
  std::vector<TypedLevel> levels;
  SourcePlacement placement = SourcePlacement::BeforeFrom;
};

enum class QueryKind { PureEist, CureQL };

std::string_view to_string(QueryKind kind);

struct TypedSelect {
  SelectStmt ast;
  std::vector<FromBinding> from;
  std::vector<BoundColumn> projection;
  std::vector<TypedComparison> where;
  std::optional<UsingClause> using_clause;
  std::optional<LimitClause> limit;
  std::optional<TypedSourceClause> source;
  std::vector<BoundColumn> group_by;
  std::optional<TypedSourceClause> cluster_source;
  QueryKind kind = QueryKind::PureEist;

  std::vector<std::string> output_names() const;
  /// FROM bindings whose relation has crowd columns or is a crowd table.
  std::vector<std::size_t> crowd_bindings() const;
};

struct TypedCreateTable {
  std::string name;
  eist::Schema schema;
};

struct TypedCreateView {
  std::string name;
  SelectStmt query;
  std::shared_ptr<const TypedSelect> typed;
};

struct TypedInsert {
  std::string relation;
  InsertTarget target = InsertTarget::Facts;
  eist::Row values;
  std::vector<std::string> contributors;
};

using TypedStatement = std::variant<TypedCreateTable, TypedCreateView, TypedSelect, TypedInsert>;

struct ValidationResult {
  std::optional<TypedStatement> statement;  // absent when any error was reported
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return statement.has_value(); }
};

/// Resolves names, aliases and types against the catalog and enforces the
/// CureQL scope and placement rules. Pure function of its inputs.
ValidationResult validate(const Statement& stmt, const Catalog& catalog);

/// Coerces a literal to a column type; nullopt on mismatch.
std::optional<eist::Value> coerce_literal(const Literal& lit, eist::BaseType type);

}  // namespace curelite::cureql
