#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curelite/eist/value.hpp"

namespace curelite::cureql {

/// Source position of a node. Positions never take part in structural
/// equality so that re-parsed canonical text compares equal to the original.
struct SourcePos {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

/// Heap box with value semantics, for recursive AST nodes.
template <typename T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct ColumnRef {
  std::string qualifier;  // tuple variable or relation name; empty when absent
  std::string name;
  SourcePos pos;

  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct StringLit {
  std::string text;
  friend bool operator==(const StringLit&, const StringLit&) = default;
};
struct NumberLit {
  double value = 0;
  friend bool operator==(const NumberLit&, const NumberLit&) = default;
};
struct CNullLit {
  friend bool operator==(const CNullLit&, const CNullLit&) = default;
};
using Literal = std::variant<StringLit, NumberLit, CNullLit>;

using Operand = std::variant<ColumnRef, Literal>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Comparison {
  Operand lhs;
  CompareOp op = CompareOp::Eq;
  Operand rhs;
  SourcePos pos;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct TableRef {
  std::string relation;
  std::string alias;  // empty when absent
  SourcePos pos;

  friend bool operator==(const TableRef&, const TableRef&) = default;
};

struct SelectStmt;

/// One level of a curator hierarchy: a relation or view name, or a query.
struct SourceLevel {
  std::variant<std::string, Box<SelectStmt>> expr;
  SourcePos pos;

  friend bool operator==(const SourceLevel&, const SourceLevel&) = default;
};

enum class SourcePlacement { BeforeFrom, AfterFrom };

/// `SOURCE l1 BEFORE l2 ...`; later levels outrank earlier ones.
struct SourceClause {
  std::vector<SourceLevel> levels;
  SourcePlacement placement = SourcePlacement::BeforeFrom;
  SourcePos pos;

  friend bool operator==(const SourceClause&, const SourceClause&) = default;
};

/// Either an integer literal or a placeholder identifier bound at execution.
struct LimitAmount {
  std::variant<std::int64_t, std::string> value;
  SourcePos pos;

  friend bool operator==(const LimitAmount&, const LimitAmount&) = default;
};

struct LimitClause {
  std::optional<LimitAmount> time;  // TIME t UNITS
  std::optional<LimitAmount> rows;  // DATA k ROWS

  friend bool operator==(const LimitClause&, const LimitClause&) = default;
};

struct UsingClause {
  std::string tool;
  std::optional<std::string> input;
  SourcePos pos;

  friend bool operator==(const UsingClause&, const UsingClause&) = default;
};

struct GroupByClause {
  std::vector<ColumnRef> columns;
  std::optional<SourceClause> cluster_source;

  friend bool operator==(const GroupByClause&, const GroupByClause&) = default;
};

struct SelectStmt {
  std::vector<ColumnRef> projection;
  std::optional<UsingClause> using_clause;
  std::optional<LimitClause> limit;
  std::optional<SourceClause> source;  // global, either placement
  std::vector<TableRef> from;
  std::vector<Comparison> where;  // conjunction; empty when absent
  std::optional<GroupByClause> group_by;
  SourcePos pos;

  friend bool operator==(const SelectStmt&, const SelectStmt&) = default;
};

struct ColumnDef {
  std::string name;
  eist::BaseType type = eist::BaseType::String;
  bool crowd = false;
  bool unique = false;
  SourcePos pos;

  friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct ForeignKeyDef {
  std::vector<std::string> columns;
  std::string referenced_relation;
  std::vector<std::string> referenced_columns;
  SourcePos pos;

  friend bool operator==(const ForeignKeyDef&, const ForeignKeyDef&) = default;
};

struct CreateTableStmt {
  std::string name;
  bool crowd_table = false;
  std::vector<ColumnDef> columns;
  std::vector<std::string> primary_key;
  std::optional<std::vector<std::string>> source_key;
  std::vector<ForeignKeyDef> foreign_keys;
  SourcePos pos;

  friend bool operator==(const CreateTableStmt&, const CreateTableStmt&) = default;
};

struct CreateViewStmt {
  std::string name;
  SelectStmt query;
  SourcePos pos;

  friend bool operator==(const CreateViewStmt&, const CreateViewStmt&) = default;
};

enum class InsertTarget { Facts, Predict };

/// `INSERT INTO r [FACTS|PREDICT] VALUES (...) [SOURCE (c1, ...)]`.
struct InsertStmt {
  std::string relation;
  InsertTarget target = InsertTarget::Facts;
  std::vector<Literal> values;
  std::vector<std::string> contributors;  // display names of contributing sources
  SourcePos pos;

  friend bool operator==(const InsertStmt&, const InsertStmt&) = default;
};

using Statement = std::variant<CreateTableStmt, CreateViewStmt, SelectStmt, InsertStmt>;

std::string_view to_string(CompareOp op);

}  // namespace curelite::cureql
