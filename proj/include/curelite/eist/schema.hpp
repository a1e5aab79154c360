#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curelite/eist/value.hpp"

namespace curelite::eist {

struct Attribute {
  std::string name;
  BaseType type = BaseType::String;
  bool crowd = false;
  bool unique = false;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct ForeignKey {
  std::vector<std::string> columns;
  std::string referenced_relation;
  std::vector<std::string> referenced_columns;

  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

/// Relation scheme. Key sets are stored as attribute positions in declaration
/// order of the key clause.
class Schema {
 public:
  Schema() = default;
  /// An empty primary key means "all attributes". Throws SchemaMismatch on
  /// unknown or duplicate names.
  Schema(std::vector<Attribute> attributes, bool crowd_table, const std::vector<std::string>& primary_key,
         const std::optional<std::vector<std::string>>& source_key = std::nullopt,
         std::vector<ForeignKey> foreign_keys = {});

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t arity() const { return attributes_.size(); }
  bool crowd_table() const { return crowd_table_; }
  const std::vector<std::size_t>& primary_key() const { return primary_key_; }
  const std::optional<std::vector<std::size_t>>& source_key() const { return source_key_; }
  const std::vector<ForeignKey>& foreign_keys() const { return foreign_keys_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool is_key_column(std::size_t index) const;
  bool is_crowd_column(std::size_t index) const;
  bool has_crowd_columns() const;
  std::vector<std::string> primary_key_names() const;
  std::optional<std::vector<std::string>> source_key_names() const;

  Row key_of(const Row& row) const;
  Row non_key_of(const Row& row) const;

  /// Arity and type conformance; CNULL only on crowd, non-key columns.
  /// Throws SchemaMismatch.
  void check_row(const Row& row, bool allow_cnull) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attributes_;
  bool crowd_table_ = false;
  std::vector<std::size_t> primary_key_;
  std::optional<std::vector<std::size_t>> source_key_;
  std::vector<ForeignKey> foreign_keys_;
};

}  // namespace curelite::eist
