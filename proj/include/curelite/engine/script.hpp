#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "curelite/cureql/diagnostic.hpp"
#include "curelite/cureql/validator.hpp"
#include "curelite/engine/database.hpp"

namespace curelite::engine {

struct ScriptResult {
  std::size_t statements = 0;
  std::vector<cureql::Diagnostic> warnings;
  std::vector<std::string> write_warnings;  // foreign-key checks and similar
};

/// Validates and applies CREATE and INSERT statements one at a time, so later
/// statements see earlier definitions. Throws DiagnosticError on the first
/// parse or validation error; SELECT statements are rejected.
ScriptResult run_script(Database& db, std::string_view text);

/// Parses and validates one SELECT against `catalog`. Warnings are appended to
/// `warnings` when given. Throws DiagnosticError.
cureql::TypedSelect compile_select(std::string_view text, const cureql::Catalog& catalog,
                                   std::vector<cureql::Diagnostic>* warnings = nullptr);

}  // namespace curelite::engine
