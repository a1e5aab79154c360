#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "curelite/cureql/diagnostic.hpp"

namespace curelite::cureql {

enum class TokenKind { Keyword, Identifier, String, Number, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  /// Keywords: upper case. Identifiers: as written. Strings: unescaped
  /// contents. Symbols: canonical ASCII spelling (`>=` for `≥`).
  std::string text;
  /// Exact source spelling.
  std::string raw;
  int line = 1;
  int column = 1;
};

std::string_view to_string(TokenKind kind);

/// Keywords are matched case-insensitively.
bool is_keyword(std::string_view word);
/// Keywords that can never serve as identifiers.
bool is_reserved(std::string_view upper_word);

/// Splits CureQL text into tokens, ending with a single End token. `--`
/// starts a comment running to end of line. Throws DiagnosticError with
/// code UnterminatedString or IllegalCharacter.
std::vector<Token> tokenize(std::string_view text);

}  // namespace curelite::cureql
