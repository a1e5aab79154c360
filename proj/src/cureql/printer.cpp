#include "curelite/cureql/printer.hpp"

#include <sstream>

namespace curelite::cureql {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "=";
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

namespace {

std::string literal_text(const Literal& lit) {
  struct Visitor {
    std::string operator()(const StringLit& s) const { return quote_string(s.text); }
    std::string operator()(const NumberLit& n) const { return eist::format_number(n.value); }
    std::string operator()(const CNullLit&) const { return "CNULL"; }
  };
  return std::visit(Visitor{}, lit);
}

std::string column_text(const ColumnRef& c) { return c.qualifier.empty() ? c.name : c.qualifier + "." + c.name; }

std::string operand_text(const Operand& o) {
  if (const auto* c = std::get_if<ColumnRef>(&o)) return column_text(*c);
  return literal_text(std::get<Literal>(o));
}

std::string joined(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string limit_amount_text(const LimitAmount& a) {
  if (const auto* n = std::get_if<std::int64_t>(&a.value)) return std::to_string(*n);
  return std::get<std::string>(a.value);
}

std::string select_text(const SelectStmt& s);

std::string source_text(const SourceClause& clause) {
  std::vector<std::string> levels;
  for (const auto& level : clause.levels) {
    if (const auto* name = std::get_if<std::string>(&level.expr)) {
      levels.push_back(*name);
    } else {
      levels.push_back("(" + select_text(*std::get<Box<SelectStmt>>(level.expr)) + ")");
    }
  }
  return joined(levels, " BEFORE ");
}

std::string select_text(const SelectStmt& s) {
  std::vector<std::string> cols;
  for (const auto& c : s.projection) cols.push_back(column_text(c));
  std::string out = "SELECT " + joined(cols);
  if (s.using_clause) {
    out += " USING " + s.using_clause->tool;
    if (s.using_clause->input) out += " ON " + *s.using_clause->input;
  }
  if (s.limit) {
    std::vector<std::string> items;
    if (s.limit->time) items.push_back("TIME " + limit_amount_text(*s.limit->time) + " UNITS");
    if (s.limit->rows) items.push_back("DATA " + limit_amount_text(*s.limit->rows) + " ROWS");
    out += " LIMIT " + joined(items);
  }
  if (s.source && s.source->placement == SourcePlacement::BeforeFrom) out += " SOURCE " + source_text(*s.source);
  std::vector<std::string> tables;
  for (const auto& t : s.from) tables.push_back(t.alias.empty() ? t.relation : t.relation + " AS " + t.alias);
  out += " FROM " + joined(tables);
  if (!s.where.empty()) {
    std::vector<std::string> preds;
    for (const auto& c : s.where) {
      preds.push_back(operand_text(c.lhs) + " " + std::string(to_string(c.op)) + " " + operand_text(c.rhs));
    }
    out += " WHERE " + joined(preds, " AND ");
  }
  if (s.source && s.source->placement == SourcePlacement::AfterFrom) out += " SOURCE " + source_text(*s.source);
  if (s.group_by) {
    std::vector<std::string> gcols;
    for (const auto& c : s.group_by->columns) gcols.push_back(column_text(c));
    out += " GROUP BY " + joined(gcols);
    if (s.group_by->cluster_source) out += " CLUSTER SOURCE " + source_text(*s.group_by->cluster_source);
  }
  return out;
}

struct StatementPrinter {
  std::string operator()(const SelectStmt& s) const { return select_text(s); }
  std::string operator()(const CreateViewStmt& v) const { return "CREATE VIEW " + v.name + " AS " + select_text(v.query); }
  std::string operator()(const CreateTableStmt& t) const {
    std::vector<std::string> elems;
    for (const auto& c : t.columns) {
      std::string e = c.name + (c.crowd ? " CROWD " : " ") + std::string(eist::to_string(c.type));
      if (c.unique) e += " UNIQUE";
      elems.push_back(std::move(e));
    }
    if (t.source_key) elems.push_back("SOURCE KEY (" + joined(*t.source_key) + ")");
    if (!t.primary_key.empty()) elems.push_back("PRIMARY KEY (" + joined(t.primary_key) + ")");
    for (const auto& fk : t.foreign_keys) {
      elems.push_back("FOREIGN KEY (" + joined(fk.columns) + ") REF " + fk.referenced_relation + " (" +
                      joined(fk.referenced_columns) + ")");
    }
    return std::string("CREATE ") + (t.crowd_table ? "CROWD " : "") + "TABLE " + t.name + " (" + joined(elems) + ")";
  }
  std::string operator()(const InsertStmt& i) const {
    std::vector<std::string> vals;
    for (const auto& v : i.values) vals.push_back(literal_text(v));
    std::string out = "INSERT INTO " + i.relation + (i.target == InsertTarget::Facts ? " FACTS" : " PREDICT") +
                      " VALUES (" + joined(vals) + ")";
    if (!i.contributors.empty()) {
      std::vector<std::string> names;
      for (const auto& c : i.contributors) names.push_back(quote_string(c));
      out += " SOURCE (" + joined(names) + ")";
    }
    return out;
  }
};

// -- dump -------------------------------------------------------------------

class Dumper {
 public:
  std::string str() const { return out_.str(); }

  void statement(const Statement& s) {
    std::visit([this](const auto& v) { node(v); }, s);
  }

 private:
  void line(const std::string& text) { out_ << std::string(depth_ * 2, ' ') << text << '\n'; }

  void open(const std::string& label) {
    line(label);
    ++depth_;
  }
  void close() { --depth_; }

  void node(const SelectStmt& s) {
    open("select");
    std::vector<std::string> cols;
    for (const auto& c : s.projection) cols.push_back(column_text(c));
    line("projection: " + joined(cols));
    if (s.using_clause) {
      line("using: " + s.using_clause->tool + (s.using_clause->input ? " on " + *s.using_clause->input : ""));
    }
    if (s.limit) {
      line("limit.time: " + (s.limit->time ? limit_amount_text(*s.limit->time) : std::string("-")));
      line("limit.rows: " + (s.limit->rows ? limit_amount_text(*s.limit->rows) : std::string("-")));
    }
    if (s.source) source("source", *s.source);
    std::vector<std::string> tables;
    for (const auto& t : s.from) tables.push_back(t.alias.empty() ? t.relation : t.relation + " as " + t.alias);
    line("from: " + joined(tables));
    for (const auto& c : s.where) {
      line("where: " + operand_text(c.lhs) + " " + std::string(to_string(c.op)) + " " + operand_text(c.rhs));
    }
    if (s.group_by) {
      std::vector<std::string> g;
      for (const auto& c : s.group_by->columns) g.push_back(column_text(c));
      line("group_by: " + joined(g));
      if (s.group_by->cluster_source) source("cluster_source", *s.group_by->cluster_source);
    }
    close();
  }

  void source(const std::string& label, const SourceClause& clause) {
    open(label + " (" + (clause.placement == SourcePlacement::BeforeFrom ? "before_from" : "after_from") + ")");
    for (std::size_t i = 0; i < clause.levels.size(); ++i) {
      const auto& level = clause.levels[i];
      if (const auto* name = std::get_if<std::string>(&level.expr)) {
        line("level " + std::to_string(i + 1) + ": " + *name);
      } else {
        open("level " + std::to_string(i + 1) + ":");
        node(*std::get<Box<SelectStmt>>(level.expr));
        close();
      }
    }
    close();
  }

  void node(const CreateTableStmt& t) {
    open(std::string("create_table ") + t.name + (t.crowd_table ? " crowd" : ""));
    for (const auto& c : t.columns) {
      line("column: " + c.name + " " + std::string(eist::to_string(c.type)) + (c.crowd ? " crowd" : "") +
           (c.unique ? " unique" : ""));
    }
    line("primary_key: " + joined(t.primary_key));
    if (t.source_key) line("source_key: " + joined(*t.source_key));
    for (const auto& fk : t.foreign_keys) {
      line("foreign_key: (" + joined(fk.columns) + ") -> " + fk.referenced_relation + " (" +
           joined(fk.referenced_columns) + ")");
    }
    close();
  }

  void node(const CreateViewStmt& v) {
    open("create_view " + v.name);
    node(v.query);
    close();
  }

  void node(const InsertStmt& i) {
    open("insert " + i.relation + (i.target == InsertTarget::Facts ? " facts" : " predict"));
    std::vector<std::string> vals;
    for (const auto& v : i.values) vals.push_back(literal_text(v));
    line("values: " + joined(vals));
    if (!i.contributors.empty()) line("contributors: " + joined(i.contributors));
    close();
  }

  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::string pretty_print(const Statement& stmt) { return std::visit(StatementPrinter{}, stmt) + ";"; }

std::string pretty_print(const SelectStmt& stmt) { return select_text(stmt) + ";"; }

std::string dump(const Statement& stmt) {
  Dumper d;
  d.statement(stmt);
  return d.str();
}

}  // namespace curelite::cureql
