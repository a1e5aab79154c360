#include "curelite/cureql/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace curelite::cureql {

namespace {

constexpr std::array kKeywords = {
    "AND",    "AS",     "BEFORE",     "BY",     "CLUSTER", "CNULL",  "CREATE", "CROWD",   "DATA",
    "DATE",   "FACTS",  "FOREIGN",    "FROM",   "GROUP",   "INSERT", "INTO",   "KEY",     "LIMIT",
    "NUMBER", "ON",     "PREDICT",    "PRIMARY", "REF",    "REFERENCES", "ROWS", "SELECT", "SOURCE",
    "STRING", "TABLE",  "TIME",       "UNIQUE", "UNITS",   "USING",  "VALUES", "VIEW",    "WHERE",
};

constexpr std::array kReserved = {
    "AND",   "AS",    "BEFORE", "BY",     "CLUSTER", "CNULL",  "CREATE", "FOREIGN", "FROM",  "GROUP",
    "INSERT", "INTO", "LIMIT",  "ON",     "PRIMARY", "SELECT", "SOURCE", "TABLE",   "USING", "VALUES",
    "VIEW",  "WHERE",
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void fail(ErrorCode code, std::string_view diag_code, std::string message, int line, int column) {
  throw DiagnosticError(code, {Diagnostic{Severity::Error, std::string(diag_code), std::move(message), line, column}});
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::String: return "string";
    case TokenKind::Number: return "number";
    case TokenKind::Symbol: return "symbol";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

bool is_keyword(std::string_view word) {
  const auto u = upper(word);
  return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

bool is_reserved(std::string_view upper_word) {
  return std::find(kReserved.begin(), kReserved.end(), upper_word) != kReserved.end();
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  int line = 1;
  int column = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  auto push = [&](TokenKind kind, std::string canon, std::size_t start, int l, int c) {
    tokens.push_back(Token{kind, std::move(canon), std::string(text.substr(start, i - start)), l, c});
  };

  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }

    const std::size_t start = i;
    const int l = line, c = column;

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) advance(1);
      std::string word(text.substr(start, i - start));
      if (is_keyword(word)) {
        push(TokenKind::Keyword, upper(word), start, l, c);
      } else {
        push(TokenKind::Identifier, word, start, l, c);
      }
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(ch))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
      if (i + 1 < text.size() && text[i] == '.' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        advance(1);
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
      }
      push(TokenKind::Number, std::string(text.substr(start, i - start)), start, l, c);
      continue;
    }

    if (ch == '"' || ch == '\'') {
      const char quote = ch;
      advance(1);
      std::string contents;
      bool closed = false;
      while (i < text.size()) {
        const char cur = text[i];
        if (cur == quote) {
          advance(1);
          closed = true;
          break;
        }
        if (cur == '\\' && i + 1 < text.size()) {
          const char esc = text[i + 1];
          switch (esc) {
            case 'n': contents += '\n'; break;
            case 't': contents += '\t'; break;
            default: contents += esc; break;
          }
          advance(2);
          continue;
        }
        contents += cur;
        advance(1);
      }
      if (!closed) fail(ErrorCode::UnterminatedString, "unterminated_string", "string literal is not closed", l, c);
      push(TokenKind::String, std::move(contents), start, l, c);
      continue;
    }

    // UTF-8 comparison operators written in typeset queries.
    if (text.substr(i, 3) == "\xE2\x89\xA5") {
      advance(3);
      push(TokenKind::Symbol, ">=", start, l, c);
      continue;
    }
    if (text.substr(i, 3) == "\xE2\x89\xA4") {
      advance(3);
      push(TokenKind::Symbol, "<=", start, l, c);
      continue;
    }
    if (text.substr(i, 3) == "\xE2\x89\xA0") {
      advance(3);
      push(TokenKind::Symbol, "!=", start, l, c);
      continue;
    }

    const std::string_view two = text.substr(i, 2);
    if (two == "<=" || two == ">=" || two == "!=" || two == "<>") {
      advance(2);
      push(TokenKind::Symbol, two == "<>" ? "!=" : std::string(two), start, l, c);
      continue;
    }
    if (std::string_view("(),;.=<>*-").find(ch) != std::string_view::npos) {
      advance(1);
      push(TokenKind::Symbol, std::string(1, ch), start, l, c);
      continue;
    }

    std::string shown = static_cast<unsigned char>(ch) < 0x80 ? std::string(1, ch) : std::string("non-ASCII byte");
    fail(ErrorCode::IllegalCharacter, "illegal_character", "illegal character '" + shown + "'", l, c);
  }
  // End sits on the last real token so every diagnostic points inside the text.
  const int end_line = tokens.empty() ? 1 : tokens.back().line;
  const int end_column = tokens.empty() ? 1 : tokens.back().column;
  tokens.push_back(Token{TokenKind::End, "", "", end_line, end_column});
  return tokens;
}

}  // namespace curelite::cureql
