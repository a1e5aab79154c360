#pragma once

#include <map>
#include <string>

#include "curelite/cureql/ast.hpp"
#include "curelite/eist/schema.hpp"

namespace curelite::cureql {

/// A registered analytics tool usable in `USING tool [ON input]`.
struct ExtractorDecl {
  enum class Kind { File, Program };

  std::string name;
  Kind kind = Kind::File;
  /// File adapters: the candidate file, or with `requires_input` a directory
  /// holding `<input>.tsv`. Program adapters: the executable.
  std::string location;
  bool requires_input = false;

  friend bool operator==(const ExtractorDecl&, const ExtractorDecl&) = default;
};

struct Catalog {
  std::map<std::string, eist::Schema> relations;
  std::map<std::string, SelectStmt> views;
  std::map<std::string, ExtractorDecl> extractors;

  bool has_name(const std::string& name) const { return relations.count(name) || views.count(name); }

  friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Throws SchemaMismatch for an ill-formed declaration.
eist::Schema schema_from(const CreateTableStmt& stmt);
CreateTableStmt to_ddl(const std::string& name, const eist::Schema& schema);

}  // namespace curelite::cureql
