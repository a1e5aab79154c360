#include "curelite/cureql/catalog.hpp"

namespace curelite::cureql {

eist::Schema schema_from(const CreateTableStmt& stmt) {
  std::vector<eist::Attribute> attrs;
  for (const auto& c : stmt.columns) attrs.push_back(eist::Attribute{c.name, c.type, c.crowd, c.unique});
  std::vector<eist::ForeignKey> fks;
  for (const auto& fk : stmt.foreign_keys) {
    fks.push_back(eist::ForeignKey{fk.columns, fk.referenced_relation, fk.referenced_columns});
  }
  return eist::Schema(std::move(attrs), stmt.crowd_table, stmt.primary_key, stmt.source_key, std::move(fks));
}

CreateTableStmt to_ddl(const std::string& name, const eist::Schema& schema) {
  CreateTableStmt stmt;
  stmt.name = name;
  stmt.crowd_table = schema.crowd_table();
  for (const auto& a : schema.attributes()) stmt.columns.push_back(ColumnDef{a.name, a.type, a.crowd, a.unique, {}});
  stmt.primary_key = schema.primary_key_names();
  stmt.source_key = schema.source_key_names();
  for (const auto& fk : schema.foreign_keys()) {
    stmt.foreign_keys.push_back(ForeignKeyDef{fk.columns, fk.referenced_relation, fk.referenced_columns, {}});
  }
  return stmt;
}

}  // namespace curelite::cureql
