#include <doctest.h>

#include "curelite/cureql/lexer.hpp"

using namespace curelite;
using namespace curelite::cureql;

namespace {

std::vector<std::pair<TokenKind, std::string>> shape(const std::vector<Token>& ts) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : ts) out.emplace_back(t.kind, t.text);
  return out;
}

}  // namespace

TEST_CASE("tokenize a plain select") {
  const auto ts = tokenize("SELECT pName FROM Interaction;");
  // Five lexical tokens, then the End terminator.
  REQUIRE(ts.size() == 6);
  CHECK(shape(ts) == std::vector<std::pair<TokenKind, std::string>>{{TokenKind::Keyword, "SELECT"},
                                                                    {TokenKind::Identifier, "pName"},
                                                                    {TokenKind::Keyword, "FROM"},
                                                                    {TokenKind::Identifier, "Interaction"},
                                                                    {TokenKind::Symbol, ";"},
                                                                    {TokenKind::End, ""}});
  CHECK(ts[1].line == 1);
  CHECK(ts[1].column == 8);
  CHECK(ts[3].column == 19);
}

TEST_CASE("tokenize the q4 LIMIT clause") {
  const auto ts = tokenize("LIMIT TIME t UNITS, DATA k ROWS");
  CHECK(shape(ts) == std::vector<std::pair<TokenKind, std::string>>{
                         {TokenKind::Keyword, "LIMIT"}, {TokenKind::Keyword, "TIME"},  {TokenKind::Identifier, "t"},
                         {TokenKind::Keyword, "UNITS"}, {TokenKind::Symbol, ","},      {TokenKind::Keyword, "DATA"},
                         {TokenKind::Identifier, "k"},  {TokenKind::Keyword, "ROWS"},  {TokenKind::End, ""}});
}

TEST_CASE("keywords are case-insensitive, identifiers keep their case") {
  const auto ts = tokenize("select Cluster source Before cnull pname");
  CHECK(ts[0].text == "SELECT");
  CHECK(ts[0].raw == "select");
  CHECK(ts[1].text == "CLUSTER");
  CHECK(ts[2].text == "SOURCE");
  CHECK(ts[3].text == "BEFORE");
  CHECK(ts[4].text == "CNULL");
  CHECK(ts[5].kind == TokenKind::Identifier);
  CHECK(ts[5].text == "pname");
}

TEST_CASE("strings, numbers, comments and operators") {
  const auto ts = tokenize("-- note\nx >= 'a\\'b' AND y \xe2\x89\xa5 12.5 AND z <> \"q\"");
  CHECK(ts[0].line == 2);
  CHECK(ts[0].column == 1);
  CHECK(ts[1].text == ">=");
  CHECK(ts[2].kind == TokenKind::String);
  CHECK(ts[2].text == "a'b");
  CHECK(ts[5].text == ">=");
  CHECK(ts[5].raw == "\xe2\x89\xa5");
  CHECK(ts[6].kind == TokenKind::Number);
  CHECK(ts[6].text == "12.5");
  CHECK(ts[9].text == "!=");
  CHECK(ts[10].text == "q");
}

TEST_CASE("unterminated string is reported at its opening quote") {
  try {
    tokenize("\"activation");
    FAIL("expected UnterminatedString");
  } catch (const DiagnosticError& e) {
    CHECK(e.code() == ErrorCode::UnterminatedString);
    REQUIRE(e.diagnostics().size() == 1);
    CHECK(e.diagnostics()[0].code == "unterminated_string");
    CHECK(e.diagnostics()[0].line == 1);
    CHECK(e.diagnostics()[0].column == 1);
  }
  try {
    tokenize("SELECT a\nFROM b WHERE c = 'x");
    FAIL("expected UnterminatedString");
  } catch (const DiagnosticError& e) {
    CHECK(e.diagnostics()[0].line == 2);
    CHECK(e.diagnostics()[0].column == 18);
  }
}

TEST_CASE("illegal character carries its position") {
  try {
    tokenize("SELECT a FROM b\n  WHERE a # 3");
    FAIL("expected IllegalCharacter");
  } catch (const DiagnosticError& e) {
    CHECK(e.code() == ErrorCode::IllegalCharacter);
    CHECK(e.diagnostics()[0].line == 2);
    CHECK(e.diagnostics()[0].column == 11);
  }
}
