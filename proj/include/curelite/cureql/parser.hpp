#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "curelite/cureql/ast.hpp"
#include "curelite/cureql/diagnostic.hpp"

namespace curelite::cureql {

struct ParseResult {
  std::optional<Statement> statement;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return statement.has_value(); }
};

/// Parses exactly one statement. The trailing `;` may be omitted at end of
/// input. Failures come back as diagnostics (syntax_error carries the set of
/// expected tokens).
ParseResult parse(std::string_view text);

/// Parses a `;`-separated script. Throws DiagnosticError on the first error.
std::vector<Statement> parse_script(std::string_view text);

}  // namespace curelite::cureql
