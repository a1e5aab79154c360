#include "curelite/engine/script.hpp"

#include "curelite/cureql/parser.hpp"
#include "curelite/cureql/validator.hpp"

namespace curelite::engine {

ScriptResult run_script(Database& db, std::string_view text) {
  ScriptResult out;
  for (const auto& stmt : cureql::parse_script(text)) {
    if (std::holds_alternative<cureql::SelectStmt>(stmt)) {
      throw cureql::DiagnosticError(
          ErrorCode::InvalidArgument,
          {cureql::Diagnostic{cureql::Severity::Error, "select_in_script", "scripts may only define and insert",
                              std::get<cureql::SelectStmt>(stmt).pos.line, std::get<cureql::SelectStmt>(stmt).pos.column}});
    }
    auto v = cureql::validate(stmt, db.snapshot()->catalog);
    if (!v.ok()) throw cureql::DiagnosticError(ErrorCode::ValidationFailed, v.diagnostics);
    out.warnings.insert(out.warnings.end(), v.diagnostics.begin(), v.diagnostics.end());
    auto w = db.execute(*v.statement);
    out.write_warnings.insert(out.write_warnings.end(), w.warnings.begin(), w.warnings.end());
    ++out.statements;
  }
  return out;
}

cureql::TypedSelect compile_select(std::string_view text, const cureql::Catalog& catalog,
                                   std::vector<cureql::Diagnostic>* warnings) {
  auto parsed = cureql::parse(text);
  if (!parsed.ok()) throw cureql::DiagnosticError(ErrorCode::SyntaxError, parsed.diagnostics);
  if (!std::holds_alternative<cureql::SelectStmt>(*parsed.statement)) {
    throw cureql::DiagnosticError(ErrorCode::InvalidArgument,
                                  {cureql::Diagnostic{cureql::Severity::Error, "not_a_select", "expected a SELECT statement", 1, 1}});
  }
  auto v = cureql::validate(*parsed.statement, catalog);
  if (!v.ok()) throw cureql::DiagnosticError(ErrorCode::ValidationFailed, v.diagnostics);
  if (warnings) warnings->insert(warnings->end(), v.diagnostics.begin(), v.diagnostics.end());
  return std::get<cureql::TypedSelect>(*v.statement);
}

}  // namespace curelite::engine
