#include "curelite/eist/schema.hpp"

#include <algorithm>

#include "curelite/common/error.hpp"

namespace curelite::eist {

namespace {

std::vector<std::size_t> resolve_names(const std::vector<Attribute>& attributes,
                                       const std::vector<std::string>& names, std::string_view what) {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == n; });
    if (it == attributes.end()) {
      throw Error(ErrorCode::SchemaMismatch, std::string(what) + " names unknown attribute '" + n + "'");
    }
    auto idx = static_cast<std::size_t>(it - attributes.begin());
    if (std::find(out.begin(), out.end(), idx) != out.end()) {
      throw Error(ErrorCode::SchemaMismatch, std::string(what) + " repeats attribute '" + n + "'");
    }
    out.push_back(idx);
  }
  return out;
}

bool matches_type(const Value& v, BaseType type) {
  switch (type) {
    case BaseType::String: return std::holds_alternative<std::string>(v);
    case BaseType::Number: return std::holds_alternative<double>(v);
    case BaseType::Date: return std::holds_alternative<Date>(v);
  }
  return false;
}

}  // namespace

Schema::Schema(std::vector<Attribute> attributes, bool crowd_table, const std::vector<std::string>& primary_key,
               const std::optional<std::vector<std::string>>& source_key, std::vector<ForeignKey> foreign_keys)
    : attributes_(std::move(attributes)), crowd_table_(crowd_table), foreign_keys_(std::move(foreign_keys)) {
  if (attributes_.empty()) throw Error(ErrorCode::SchemaMismatch, "a relation needs at least one attribute");
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    for (std::size_t j = i + 1; j < attributes_.size(); ++j) {
      if (attributes_[i].name == attributes_[j].name) {
        throw Error(ErrorCode::SchemaMismatch, "duplicate attribute '" + attributes_[i].name + "'");
      }
    }
  }
  if (primary_key.empty()) {
    for (std::size_t i = 0; i < attributes_.size(); ++i) primary_key_.push_back(i);
  } else {
    primary_key_ = resolve_names(attributes_, primary_key, "PRIMARY KEY");
  }
  if (source_key) {
    if (source_key->empty()) throw Error(ErrorCode::SchemaMismatch, "SOURCE KEY must name attributes");
    source_key_ = resolve_names(attributes_, *source_key, "SOURCE KEY");
  }
  for (const auto& fk : foreign_keys_) {
    resolve_names(attributes_, fk.columns, "FOREIGN KEY");
    if (fk.columns.size() != fk.referenced_columns.size()) {
      throw Error(ErrorCode::SchemaMismatch, "FOREIGN KEY column count differs from referenced column count");
    }
  }
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

bool Schema::is_key_column(std::size_t index) const {
  return std::find(primary_key_.begin(), primary_key_.end(), index) != primary_key_.end();
}

bool Schema::is_crowd_column(std::size_t index) const { return crowd_table_ || attributes_.at(index).crowd; }

bool Schema::has_crowd_columns() const {
  return crowd_table_ || std::any_of(attributes_.begin(), attributes_.end(), [](const auto& a) { return a.crowd; });
}

std::vector<std::string> Schema::primary_key_names() const {
  std::vector<std::string> out;
  for (auto i : primary_key_) out.push_back(attributes_[i].name);
  return out;
}

std::optional<std::vector<std::string>> Schema::source_key_names() const {
  if (!source_key_) return std::nullopt;
  std::vector<std::string> out;
  for (auto i : *source_key_) out.push_back(attributes_[i].name);
  return out;
}

Row Schema::key_of(const Row& row) const {
  Row out;
  for (auto i : primary_key_) out.push_back(row.at(i));
  return out;
}

Row Schema::non_key_of(const Row& row) const {
  Row out;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (!is_key_column(i)) out.push_back(row.at(i));
  }
  return out;
}

void Schema::check_row(const Row& row, bool allow_cnull) const {
  if (row.size() != attributes_.size()) {
    throw Error(ErrorCode::SchemaMismatch, "expected " + std::to_string(attributes_.size()) + " values, got " +
                                               std::to_string(row.size()));
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& attr = attributes_[i];
    if (is_cnull(row[i])) {
      if (!allow_cnull) throw Error(ErrorCode::SchemaMismatch, "CNULL not allowed for '" + attr.name + "' here");
      if (is_key_column(i)) throw Error(ErrorCode::SchemaMismatch, "key attribute '" + attr.name + "' cannot be CNULL");
      if (!is_crowd_column(i)) {
        throw Error(ErrorCode::SchemaMismatch, "'" + attr.name + "' is not a crowd column and cannot be CNULL");
      }
      continue;
    }
    if (!matches_type(row[i], attr.type)) {
      throw Error(ErrorCode::SchemaMismatch,
                  "value for '" + attr.name + "' is not of type " + std::string(to_string(attr.type)));
    }
  }
}

}  // namespace curelite::eist
