#include "curelite/cureql/parser.hpp"

#include <charconv>
#include <set>

#include "curelite/cureql/lexer.hpp"

namespace curelite::cureql {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool at_end() const { return peek().kind == TokenKind::End; }

  Statement statement() {
    if (at_keyword("CREATE")) return create();
    if (at_keyword("SELECT")) return Statement{select()};
    if (at_keyword("INSERT")) return insert();
    expected_.insert("CREATE");
    expected_.insert("SELECT");
    expected_.insert("INSERT");
    syntax_error();
  }

  /// `;`, or end of input when `allow_end`.
  void terminator(bool allow_end) {
    if (accept_symbol(";")) return;
    if (allow_end && at_end()) return;
    syntax_error();
  }

  void expect_end() {
    if (!at_end()) {
      expected_.insert("end of input");
      syntax_error();
    }
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    expected_.clear();
    return t;
  }

  SourcePos here() const { return SourcePos{peek().line, peek().column}; }

  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Keyword && t.text == kw;
  }

  bool at_symbol(std::string_view sym) const {
    return peek().kind == TokenKind::Symbol && peek().text == sym;
  }

  bool accept_keyword(std::string_view kw) {
    if (at_keyword(kw)) {
      advance();
      return true;
    }
    expected_.insert(std::string(kw));
    return false;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) syntax_error();
  }

  bool accept_symbol(std::string_view sym) {
    if (at_symbol(sym)) {
      advance();
      return true;
    }
    expected_.insert("'" + std::string(sym) + "'");
    return false;
  }

  void expect_symbol(std::string_view sym) {
    if (!accept_symbol(sym)) syntax_error();
  }

  bool at_identifier() const {
    const Token& t = peek();
    return t.kind == TokenKind::Identifier || (t.kind == TokenKind::Keyword && !is_reserved(t.text));
  }

  std::string expect_identifier() {
    if (at_identifier()) return advance().raw;
    expected_.insert("identifier");
    syntax_error();
  }

  [[noreturn]] void syntax_error() {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.raw + "'";
    std::string list;
    for (const auto& e : expected_) {
      if (!list.empty()) list += ", ";
      list += e;
    }
    throw DiagnosticError(ErrorCode::SyntaxError,
                          {Diagnostic{Severity::Error, "syntax_error",
                                      "expected one of {" + list + "}, found " + found, t.line, t.column}});
  }

  std::vector<std::string> identifier_list() {
    expect_symbol("(");
    std::vector<std::string> out{expect_identifier()};
    while (accept_symbol(",")) out.push_back(expect_identifier());
    expect_symbol(")");
    return out;
  }

  // -- DDL -----------------------------------------------------------------

  Statement create() {
    const SourcePos pos = here();
    expect_keyword("CREATE");
    if (accept_keyword("VIEW")) {
      CreateViewStmt view;
      view.pos = pos;
      view.name = expect_identifier();
      expect_keyword("AS");
      view.query = select();
      return view;
    }
    CreateTableStmt table;
    table.pos = pos;
    table.crowd_table = accept_keyword("CROWD");
    expect_keyword("TABLE");
    table.name = expect_identifier();
    expect_symbol("(");
    do {
      table_element(table);
    } while (accept_symbol(","));
    expect_symbol(")");
    return table;
  }

  void table_element(CreateTableStmt& table) {
    const SourcePos pos = here();
    if (accept_keyword("PRIMARY")) {
      expect_keyword("KEY");
      if (!table.primary_key.empty()) duplicate_clause("PRIMARY KEY", pos);
      table.primary_key = identifier_list();
      return;
    }
    if (accept_keyword("SOURCE")) {
      expect_keyword("KEY");
      if (table.source_key) duplicate_clause("SOURCE KEY", pos);
      table.source_key = identifier_list();
      return;
    }
    if (accept_keyword("FOREIGN")) {
      expect_keyword("KEY");
      ForeignKeyDef fk;
      fk.pos = pos;
      fk.columns = identifier_list();
      if (!accept_keyword("REF")) expect_keyword("REFERENCES");
      fk.referenced_relation = expect_identifier();
      fk.referenced_columns = identifier_list();
      table.foreign_keys.push_back(std::move(fk));
      return;
    }
    ColumnDef col;
    col.pos = pos;
    col.name = expect_identifier();
    if (at_keyword("CROWD")) {
      advance();
      col.crowd = true;
    } else {
      expected_.insert("CROWD");
    }
    col.type = base_type();
    col.unique = accept_keyword("UNIQUE");
    table.columns.push_back(std::move(col));
  }

  eist::BaseType base_type() {
    if (accept_keyword("STRING")) return eist::BaseType::String;
    if (accept_keyword("DATE")) return eist::BaseType::Date;
    if (accept_keyword("NUMBER")) return eist::BaseType::Number;
    syntax_error();
  }

  [[noreturn]] void duplicate_clause(std::string_view what, SourcePos pos) {
    throw DiagnosticError(ErrorCode::SyntaxError,
                          {Diagnostic{Severity::Error, "duplicate_clause",
                                      std::string(what) + " declared more than once", pos.line, pos.column}});
  }

  // -- SELECT --------------------------------------------------------------

  SelectStmt select() {
    SelectStmt s;
    s.pos = here();
    expect_keyword("SELECT");
    s.projection.push_back(column_ref());
    while (accept_symbol(",")) s.projection.push_back(column_ref());

    if (at_keyword("USING")) {
      UsingClause u;
      u.pos = here();
      advance();
      u.tool = expect_identifier();
      if (accept_keyword("ON")) u.input = expect_identifier();
      s.using_clause = std::move(u);
    } else {
      expected_.insert("USING");
    }
    if (accept_keyword("LIMIT")) s.limit = limit_clause();
    if (at_keyword("SOURCE")) {
      const SourcePos pos = here();
      advance();
      s.source = source_levels(SourcePlacement::BeforeFrom, pos);
    } else {
      expected_.insert("SOURCE");
    }

    expect_keyword("FROM");
    s.from.push_back(table_ref());
    while (accept_symbol(",")) s.from.push_back(table_ref());

    if (accept_keyword("WHERE")) {
      s.where.push_back(comparison());
      while (accept_keyword("AND")) s.where.push_back(comparison());
    }
    if (at_keyword("SOURCE")) {
      const SourcePos pos = here();
      if (s.source) duplicate_clause("SOURCE", pos);
      advance();
      s.source = source_levels(SourcePlacement::AfterFrom, pos);
    } else {
      expected_.insert("SOURCE");
    }
    if (accept_keyword("GROUP")) {
      expect_keyword("BY");
      GroupByClause g;
      g.columns.push_back(column_ref());
      while (accept_symbol(",")) g.columns.push_back(column_ref());
      if (at_keyword("CLUSTER")) {
        const SourcePos pos = here();
        advance();
        expect_keyword("SOURCE");
        g.cluster_source = source_levels(SourcePlacement::AfterFrom, pos);
      } else {
        expected_.insert("CLUSTER");
      }
      s.group_by = std::move(g);
    }
    return s;
  }

  SourceClause source_levels(SourcePlacement placement, SourcePos pos) {
    SourceClause clause;
    clause.placement = placement;
    clause.pos = pos;
    clause.levels.push_back(source_level(placement));
    while (accept_keyword("BEFORE")) clause.levels.push_back(source_level(placement));
    return clause;
  }

  SourceLevel source_level(SourcePlacement placement) {
    SourceLevel level;
    level.pos = here();
    if (accept_symbol("(")) {
      level.expr = Box<SelectStmt>(select());
      expect_symbol(")");
      return level;
    }
    if (placement == SourcePlacement::BeforeFrom && at_keyword("SELECT")) {
      // Bare nested query; it may be closed by ';' ahead of the outer FROM.
      level.expr = Box<SelectStmt>(select());
      if (at_symbol(";") && at_keyword("FROM", 1)) advance();
      return level;
    }
    if (placement == SourcePlacement::BeforeFrom) expected_.insert("SELECT");
    level.expr = expect_identifier();
    return level;
  }

  LimitClause limit_clause() {
    LimitClause limit;
    do {
      const SourcePos pos = here();
      if (accept_keyword("TIME")) {
        if (limit.time) duplicate_clause("LIMIT TIME", pos);
        limit.time = limit_amount();
        expect_keyword("UNITS");
      } else if (accept_keyword("DATA")) {
        if (limit.rows) duplicate_clause("LIMIT DATA", pos);
        limit.rows = limit_amount();
        expect_keyword("ROWS");
      } else {
        syntax_error();
      }
    } while (accept_symbol(","));
    return limit;
  }

  LimitAmount limit_amount() {
    LimitAmount amount;
    amount.pos = here();
    if (peek().kind == TokenKind::Number) {
      const Token& t = peek();
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
        expected_.insert("integer");
        syntax_error();
      }
      advance();
      amount.value = v;
      return amount;
    }
    expected_.insert("number");
    amount.value = expect_identifier();
    return amount;
  }

  TableRef table_ref() {
    TableRef ref;
    ref.pos = here();
    ref.relation = expect_identifier();
    if (accept_keyword("AS")) {
      ref.alias = expect_identifier();
    } else if (peek().kind == TokenKind::Identifier) {
      ref.alias = advance().raw;
    }
    return ref;
  }

  ColumnRef column_ref() {
    ColumnRef ref;
    ref.pos = here();
    std::string first = expect_identifier();
    if (accept_symbol(".")) {
      ref.qualifier = std::move(first);
      ref.name = expect_identifier();
    } else {
      ref.name = std::move(first);
    }
    return ref;
  }

  Comparison comparison() {
    Comparison c;
    c.pos = here();
    c.lhs = operand();
    c.op = compare_op();
    c.rhs = operand();
    return c;
  }

  CompareOp compare_op() {
    static const std::pair<const char*, CompareOp> kOps[] = {
        {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
        {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {">=", CompareOp::Ge},
    };
    for (const auto& [sym, op] : kOps) {
      if (accept_symbol(sym)) return op;
    }
    syntax_error();
  }

  std::optional<Literal> try_literal() {
    const Token& t = peek();
    if (t.kind == TokenKind::String) {
      return Literal{StringLit{advance().text}};
    }
    if (t.kind == TokenKind::Number) {
      return Literal{NumberLit{std::stod(advance().text)}};
    }
    if (at_symbol("-") && peek(1).kind == TokenKind::Number) {
      advance();
      return Literal{NumberLit{-std::stod(advance().text)}};
    }
    if (at_keyword("CNULL")) {
      advance();
      return Literal{CNullLit{}};
    }
    expected_.insert("string");
    expected_.insert("number");
    expected_.insert("CNULL");
    return std::nullopt;
  }

  Operand operand() {
    if (auto lit = try_literal()) return *lit;
    return column_ref();
  }

  // -- INSERT --------------------------------------------------------------

  Statement insert() {
    InsertStmt ins;
    ins.pos = here();
    expect_keyword("INSERT");
    expect_keyword("INTO");
    ins.relation = expect_identifier();
    bool explicit_target = false;
    if (accept_keyword("FACTS")) {
      ins.target = InsertTarget::Facts;
      explicit_target = true;
    } else if (accept_keyword("PREDICT")) {
      ins.target = InsertTarget::Predict;
      explicit_target = true;
    }
    expect_keyword("VALUES");
    expect_symbol("(");
    do {
      auto lit = try_literal();
      if (!lit) syntax_error();
      ins.values.push_back(std::move(*lit));
    } while (accept_symbol(","));
    expect_symbol(")");
    if (accept_keyword("SOURCE")) {
      expect_symbol("(");
      do {
        if (peek().kind == TokenKind::String) {
          ins.contributors.push_back(advance().text);
        } else {
          expected_.insert("string");
          ins.contributors.push_back(expect_identifier());
        }
      } while (accept_symbol(","));
      expect_symbol(")");
      if (!explicit_target) ins.target = InsertTarget::Predict;
    }
    return ins;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<std::string> expected_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  try {
    Parser p(tokenize(text));
    Statement stmt = p.statement();
    p.terminator(/*allow_end=*/true);
    p.expect_end();
    result.statement = std::move(stmt);
  } catch (const DiagnosticError& e) {
    result.diagnostics = e.diagnostics();
  }
  return result;
}

std::vector<Statement> parse_script(std::string_view text) {
  Parser p(tokenize(text));
  std::vector<Statement> out;
  while (!p.at_end()) {
    out.push_back(p.statement());
    p.terminator(/*allow_end=*/true);
  }
  return out;
}

}  // namespace curelite::cureql
