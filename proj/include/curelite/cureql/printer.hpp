#pragma once

#include <string>

#include "curelite/cureql/ast.hpp"

namespace curelite::cureql {

/// Canonical single-line CureQL text, terminated by `;`. Nested level queries
/// are always parenthesized. Parsing the output yields a structurally equal
/// statement.
std::string pretty_print(const Statement& stmt);
std::string pretty_print(const SelectStmt& stmt);

/// Indented structured dump with a fixed field order, for golden files.
std::string dump(const Statement& stmt);

std::string quote_string(std::string_view text);

}  // namespace curelite::cureql
