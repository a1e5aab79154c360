#include "curelite/cureql/validator.hpp"

#include <algorithm>
#include <charconv>

namespace curelite::cureql {

std::string_view to_string(QueryKind kind) {
  return kind == QueryKind::PureEist ? "pure-eist" : "cureql";
}

std::vector<std::string> TypedSelect::output_names() const {
  std::vector<std::string> names;
  for (const auto& c : projection) names.push_back(c.name);
  return names;
}

std::vector<std::size_t> TypedSelect::crowd_bindings() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i].schema.crowd_table() || from[i].schema.has_crowd_columns()) out.push_back(i);
  }
  return out;
}

std::optional<eist::Value> coerce_literal(const Literal& lit, eist::BaseType type) {
  if (std::holds_alternative<CNullLit>(lit)) return eist::Value{eist::CNull{}};
  if (const auto* n = std::get_if<NumberLit>(&lit)) {
    if (type == eist::BaseType::Number) return eist::Value{n->value};
    return std::nullopt;
  }
  const auto& s = std::get<StringLit>(lit).text;
  switch (type) {
    case eist::BaseType::String: return eist::Value{s};
    case eist::BaseType::Date:
      if (auto d = eist::Date::parse(s)) return eist::Value{*d};
      return std::nullopt;
    case eist::BaseType::Number: {
      double d = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
      if (ec == std::errc() && p == s.data() + s.size()) return eist::Value{d};
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

struct Scope {
  const std::vector<FromBinding>* bindings = nullptr;
  bool visible = false;  // before_from levels cannot see the outer FROM
};

struct Resolved {
  enum class Kind { Local, Outer, Hidden, Failed };
  Kind kind = Kind::Failed;
  std::size_t binding = 0;
  std::size_t attribute = 0;
  eist::BaseType type = eist::BaseType::String;
  std::string name;
};

std::string describe(const ColumnRef& ref) {
  return ref.qualifier.empty() ? ref.name : ref.qualifier + "." + ref.name;
}

std::optional<std::size_t> find_alias(const std::vector<FromBinding>& bs, const std::string& alias) {
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (bs[i].alias == alias) return i;
  }
  return std::nullopt;
}

class Validator {
 public:
  explicit Validator(const Catalog& catalog) : catalog_(catalog) {}

  std::vector<Diagnostic> diags;

  void error(std::string code, std::string message, SourcePos pos) {
    diags.push_back(Diagnostic{Severity::Error, std::move(code), std::move(message), pos.line, pos.column});
  }
  void warn(std::string code, std::string message, SourcePos pos) {
    diags.push_back(Diagnostic{Severity::Warning, std::move(code), std::move(message), pos.line, pos.column});
  }

  std::optional<TypedStatement> statement(const Statement& stmt) {
    return std::visit([this](const auto& s) { return check(s); }, stmt);
  }

 private:
  const Catalog& catalog_;

  std::optional<TypedStatement> check(const CreateTableStmt& s) {
    if (catalog_.has_name(s.name)) {
      error("duplicate_relation", "relation '" + s.name + "' already exists", s.pos);
    }
    for (const auto& fk : s.foreign_keys) {
      if (fk.columns.size() != fk.referenced_columns.size()) {
        error("foreign_key_arity", "foreign key lists " + std::to_string(fk.columns.size()) + " columns but references " +
                                       std::to_string(fk.referenced_columns.size()),
              fk.pos);
      }
      for (const auto& c : fk.columns) {
        const bool known = std::any_of(s.columns.begin(), s.columns.end(), [&](const ColumnDef& d) { return d.name == c; });
        if (!known) error("unresolved_column", "foreign key column '" + c + "' is not declared", fk.pos);
      }
      auto ref = catalog_.relations.find(fk.referenced_relation);
      if (ref == catalog_.relations.end()) {
        if (fk.referenced_relation != s.name) {
          warn("unresolved_foreign_key", "referenced relation '" + fk.referenced_relation + "' is not defined yet", fk.pos);
        }
        continue;
      }
      for (const auto& c : fk.referenced_columns) {
        if (!ref->second.index_of(c)) {
          error("unresolved_column", "'" + fk.referenced_relation + "' has no column '" + c + "'", fk.pos);
        }
      }
    }
    if (has_errors(diags)) return std::nullopt;
    try {
      return TypedCreateTable{s.name, schema_from(s)};
    } catch (const Error& e) {
      error("invalid_schema", e.what(), s.pos);
      return std::nullopt;
    }
  }

  std::optional<TypedStatement> check(const CreateViewStmt& s) {
    if (catalog_.has_name(s.name)) {
      error("duplicate_relation", "relation '" + s.name + "' already exists", s.pos);
    }
    auto typed = select(s.query, nullptr, true);
    if (!typed || has_errors(diags)) return std::nullopt;
    return TypedCreateView{s.name, s.query, std::make_shared<const TypedSelect>(std::move(*typed))};
  }

  std::optional<TypedStatement> check(const SelectStmt& s) {
    auto typed = select(s, nullptr, false);
    if (!typed || has_errors(diags)) return std::nullopt;
    return std::move(*typed);
  }

  std::optional<TypedStatement> check(const InsertStmt& s) {
    auto it = catalog_.relations.find(s.relation);
    if (it == catalog_.relations.end()) {
      error("unresolved_relation", "unknown relation '" + s.relation + "'", s.pos);
      return std::nullopt;
    }
    const auto& schema = it->second;
    if (s.values.size() != schema.arity()) {
      error("arity_mismatch", "'" + s.relation + "' has " + std::to_string(schema.arity()) + " columns, got " +
                                  std::to_string(s.values.size()) + " values",
            s.pos);
      return std::nullopt;
    }
    TypedInsert out{s.relation, s.target, {}, s.contributors};
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const auto& attr = schema.attributes()[i];
      auto v = coerce_literal(s.values[i], attr.type);
      if (!v) {
        error("type_mismatch", "value for '" + attr.name + "' is not a " + std::string(eist::to_string(attr.type)), s.pos);
        continue;
      }
      out.values.push_back(std::move(*v));
    }
    if (s.target == InsertTarget::Facts && !s.contributors.empty()) {
      error("facts_with_contributors", "facts are contributed by T only; use PREDICT with SOURCE", s.pos);
    }
    if (s.target == InsertTarget::Predict && s.contributors.empty()) {
      error("missing_contributors", "a predicted tuple needs at least one contributing source", s.pos);
    }
    if (has_errors(diags)) return std::nullopt;
    try {
      schema.check_row(out.values, true);
    } catch (const Error& e) {
      error("invalid_row", e.what(), s.pos);
      return std::nullopt;
    }
    return out;
  }

  Resolved resolve(const ColumnRef& ref, const std::vector<FromBinding>& local, const Scope* outer) {
    Resolved r;
    r.name = ref.name;
    auto bind = [&](const std::vector<FromBinding>& bs, std::size_t b, Resolved::Kind kind) {
      auto attr = bs[b].schema.index_of(ref.name);
      if (!attr) {
        error("unresolved_column", "'" + bs[b].alias + "' has no column '" + ref.name + "'", ref.pos);
        r.kind = Resolved::Kind::Failed;
        return r;
      }
      r.kind = kind;
      r.binding = b;
      r.attribute = *attr;
      r.type = bs[b].schema.attributes()[*attr].type;
      return r;
    };

    if (!ref.qualifier.empty()) {
      if (auto b = find_alias(local, ref.qualifier)) return bind(local, *b, Resolved::Kind::Local);
      if (outer && outer->bindings) {
        if (auto b = find_alias(*outer->bindings, ref.qualifier)) {
          return bind(*outer->bindings, *b, outer->visible ? Resolved::Kind::Outer : Resolved::Kind::Hidden);
        }
      }
      if (local.size() == 1) {
        warn("unresolved_qualifier",
             "unknown tuple variable '" + ref.qualifier + "' in '" + describe(ref) + "'; bound to '" + local[0].alias + "'",
             ref.pos);
        return bind(local, 0, Resolved::Kind::Local);
      }
      error("unresolved_qualifier", "unknown tuple variable '" + ref.qualifier + "'", ref.pos);
      return r;
    }

    std::vector<std::size_t> hits;
    for (std::size_t b = 0; b < local.size(); ++b) {
      if (local[b].schema.index_of(ref.name)) hits.push_back(b);
    }
    if (hits.size() > 1) {
      error("ambiguous_column", "column '" + ref.name + "' appears in more than one FROM relation", ref.pos);
      return r;
    }
    if (hits.size() == 1) return bind(local, hits[0], Resolved::Kind::Local);
    if (outer && outer->bindings && outer->visible) {
      std::vector<std::size_t> outer_hits;
      for (std::size_t b = 0; b < outer->bindings->size(); ++b) {
        if ((*outer->bindings)[b].schema.index_of(ref.name)) outer_hits.push_back(b);
      }
      if (outer_hits.size() == 1) return bind(*outer->bindings, outer_hits[0], Resolved::Kind::Outer);
    }
    error("unresolved_column", "unknown column '" + ref.name + "'", ref.pos);
    return r;
  }

  // Builds a typed comparison, or nullopt when it was dropped or failed.
  std::optional<TypedComparison> comparison(const Comparison& c, const std::vector<FromBinding>& local,
                                            const Scope* outer, bool& correlated) {
    struct Side {
      std::optional<Resolved> col;
      const Literal* lit = nullptr;
    };
    auto side = [&](const Operand& op) {
      Side s;
      if (const auto* ref = std::get_if<ColumnRef>(&op)) {
        s.col = resolve(*ref, local, outer);
      } else {
        s.lit = &std::get<Literal>(op);
      }
      return s;
    };
    Side l = side(c.lhs);
    Side r = side(c.rhs);

    auto hidden = [](const Side& s) { return s.col && s.col->kind == Resolved::Kind::Hidden; };
    auto failed = [](const Side& s) { return s.col && s.col->kind == Resolved::Kind::Failed; };
    if (hidden(l) || hidden(r)) {
      warn("uncorrelated_reference",
           "outer tuple variables are not in scope in a SOURCE clause before FROM; condition ignored", c.pos);
      return std::nullopt;
    }
    if (failed(l) || failed(r)) return std::nullopt;

    auto column_operand = [&](const Resolved& x) -> TypedOperand {
      if (x.kind == Resolved::Kind::Outer) {
        correlated = true;
        return OuterColumn{x.binding, x.attribute, x.type, x.name};
      }
      return BoundColumn{x.binding, x.attribute, x.type, x.name};
    };
    auto is_cnull = [](const Side& s) { return s.lit && std::holds_alternative<CNullLit>(*s.lit); };
    if (is_cnull(l) || is_cnull(r)) {
      error("cnull_comparison", "CNULL cannot be compared; cells awaiting the crowd never satisfy a predicate", c.pos);
      return std::nullopt;
    }

    if (l.col && r.col) {
      if (l.col->type != r.col->type) {
        error("type_mismatch", "cannot compare " + std::string(eist::to_string(l.col->type)) + " column '" +
                                   l.col->name + "' with " + std::string(eist::to_string(r.col->type)) + " column '" +
                                   r.col->name + "'",
              c.pos);
        return std::nullopt;
      }
      return TypedComparison{column_operand(*l.col), c.op, column_operand(*r.col)};
    }
    if (l.col || r.col) {
      const Resolved& col = l.col ? *l.col : *r.col;
      const Literal& lit = l.col ? *r.lit : *l.lit;
      auto v = coerce_literal(lit, col.type);
      if (!v) {
        error("type_mismatch",
              "literal is not a valid " + std::string(eist::to_string(col.type)) + " for column '" + col.name + "'", c.pos);
        return std::nullopt;
      }
      if (l.col) return TypedComparison{column_operand(col), c.op, *v};
      return TypedComparison{*v, c.op, column_operand(col)};
    }
    auto natural = [](const Literal& lit) -> eist::Value {
      if (const auto* n = std::get_if<NumberLit>(&lit)) return n->value;
      return std::get<StringLit>(lit).text;
    };
    eist::Value a = natural(*l.lit);
    eist::Value b = natural(*r.lit);
    if (a.index() != b.index()) {
      error("type_mismatch", "cannot compare a string literal with a number literal", c.pos);
      return std::nullopt;
    }
    return TypedComparison{a, c.op, b};
  }

  std::vector<std::size_t> identity_of(const TypedSelect& q, SourcePos pos) {
    std::vector<std::vector<std::size_t>> keyed;
    for (std::size_t b = 0; b < q.from.size(); ++b) {
      const auto& sk = q.from[b].schema.source_key();
      if (!sk) continue;
      std::vector<std::size_t> positions;
      for (auto attr : *sk) {
        for (std::size_t p = 0; p < q.projection.size(); ++p) {
          if (q.projection[p].binding == b && q.projection[p].attribute == attr) {
            positions.push_back(p);
            break;
          }
        }
      }
      if (positions.size() == sk->size()) keyed.push_back(std::move(positions));
    }
    if (keyed.size() > 1) {
      error("ambiguous_source_key", "curator level projects the SOURCE KEY of more than one relation", pos);
    }
    if (keyed.size() == 1) return keyed[0];
    std::vector<std::size_t> all(q.projection.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }

  std::optional<TypedLevel> level(const SourceLevel& lvl, const Scope& outer) {
    TypedLevel out;
    if (const auto* name = std::get_if<std::string>(&lvl.expr)) {
      out.name = *name;
      if (auto it = catalog_.relations.find(*name); it != catalog_.relations.end()) {
        out.kind = TypedLevel::Kind::Relation;
        const auto& schema = it->second;
        for (const auto& a : schema.attributes()) out.output_columns.push_back(a.name);
        if (schema.source_key()) {
          out.identity_columns = *schema.source_key();
        } else {
          for (std::size_t i = 0; i < schema.arity(); ++i) out.identity_columns.push_back(i);
        }
        return out;
      }
      if (auto it = catalog_.views.find(*name); it != catalog_.views.end()) {
        out.kind = TypedLevel::Kind::View;
        auto q = select(it->second, nullptr, true);
        if (!q) return std::nullopt;
        out.output_columns = q->output_names();
        out.identity_columns = identity_of(*q, lvl.pos);
        out.query = std::make_shared<const TypedSelect>(std::move(*q));
        return out;
      }
      error("unresolved_relation", "unknown relation or view '" + *name + "' in SOURCE clause", lvl.pos);
      return std::nullopt;
    }
    out.kind = TypedLevel::Kind::Query;
    bool correlated = false;
    auto q = select(*std::get<Box<SelectStmt>>(lvl.expr), &outer, true, &correlated);
    if (!q) return std::nullopt;
    out.output_columns = q->output_names();
    out.identity_columns = identity_of(*q, lvl.pos);
    out.correlated = correlated;
    out.query = std::make_shared<const TypedSelect>(std::move(*q));
    return out;
  }

  std::optional<TypedSourceClause> source_clause(const SourceClause& clause, const std::vector<FromBinding>& from,
                                                 SourcePlacement placement) {
    if (clause.levels.empty()) {
      error("empty_source", "SOURCE needs at least one curator level", clause.pos);
      return std::nullopt;
    }
    TypedSourceClause out;
    out.placement = placement;
    Scope scope{&from, placement == SourcePlacement::AfterFrom};
    bool ok = true;
    for (const auto& l : clause.levels) {
      auto t = level(l, scope);
      if (!t) {
        ok = false;
        continue;
      }
      out.levels.push_back(std::move(*t));
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void check_limit(const LimitClause& limit) {
    for (const auto* amount : {&limit.time, &limit.rows}) {
      if (!*amount) continue;
      if (const auto* n = std::get_if<std::int64_t>(&(*amount)->value); n && *n <= 0) {
        error("invalid_limit", "LIMIT amounts must be positive", (*amount)->pos);
      }
    }
  }

  // `nested` marks view bodies and curator-level queries, which may not carry
  // crowd clauses of their own.
  std::optional<TypedSelect> select(const SelectStmt& s, const Scope* outer, bool nested,
                                    bool* correlated_out = nullptr) {
    const std::size_t errors_before = error_count();
    TypedSelect out;
    out.ast = s;

    for (const auto& t : s.from) {
      const std::string alias = t.alias.empty() ? t.relation : t.alias;
      if (find_alias(out.from, alias)) {
        error("duplicate_alias", "tuple variable '" + alias + "' is bound twice", t.pos);
        continue;
      }
      if (auto it = catalog_.relations.find(t.relation); it != catalog_.relations.end()) {
        out.from.push_back(FromBinding{t.relation, alias, it->second});
      } else if (catalog_.views.count(t.relation)) {
        error("view_in_from", "views may only appear in a SOURCE clause, not in FROM", t.pos);
      } else {
        error("unresolved_relation", "unknown relation '" + t.relation + "'", t.pos);
      }
    }
    if (error_count() != errors_before) return std::nullopt;

    for (const auto& ref : s.projection) {
      Resolved r = resolve(ref, out.from, outer);
      if (r.kind == Resolved::Kind::Failed) continue;
      if (r.kind != Resolved::Kind::Local) {
        error("unresolved_column", "projection may only name columns of its own FROM relations", ref.pos);
        continue;
      }
      out.projection.push_back(BoundColumn{r.binding, r.attribute, r.type, r.name});
    }

    bool correlated = false;
    for (const auto& c : s.where) {
      if (auto tc = comparison(c, out.from, outer, correlated)) out.where.push_back(std::move(*tc));
    }
    if (correlated_out) *correlated_out = correlated;

    if (s.group_by) {
      for (const auto& ref : s.group_by->columns) {
        Resolved r = resolve(ref, out.from, nullptr);
        if (r.kind == Resolved::Kind::Local) out.group_by.push_back(BoundColumn{r.binding, r.attribute, r.type, r.name});
      }
    }

    const bool has_cluster = s.group_by && s.group_by->cluster_source;
    if (nested) {
      if (s.using_clause || s.limit || s.source || has_cluster) {
        error("nested_crowd_clause", "USING, LIMIT and SOURCE are not allowed inside a view or curator level", s.pos);
      }
      if (error_count() != errors_before) return std::nullopt;
      return out;
    }

    if (s.source && has_cluster) {
      error("source_clause_conflict", "SOURCE cannot be given both globally and in GROUP BY ... CLUSTER SOURCE",
            s.group_by->cluster_source->pos);
    }
    out.using_clause = s.using_clause;
    out.limit = s.limit;

    if (s.using_clause) {
      const auto& u = *s.using_clause;
      auto ext = catalog_.extractors.find(u.tool);
      if (ext == catalog_.extractors.end()) {
        error("unknown_extractor", "no extraction tool named '" + u.tool + "' is registered", u.pos);
      } else if (ext->second.requires_input && !u.input) {
        error("extractor_input_required", "'" + u.tool + "' needs an input given with ON", u.pos);
      }
      if (out.crowd_bindings().empty()) {
        warn("using_without_crowd", "USING has no effect: the query touches no crowd table or crowd column", u.pos);
      }
      if (!s.source && !has_cluster) {
        error("missing_source", "USING needs a SOURCE clause naming the curators", u.pos);
      }
    }
    if (s.limit) {
      check_limit(*s.limit);
      if (!s.using_clause && !s.source && !has_cluster) {
        const auto& first = s.limit->time ? *s.limit->time : *s.limit->rows;
        warn("limit_without_crowd", "LIMIT has no effect without crowd collection", first.pos);
      }
    }

    if (s.source) out.source = source_clause(*s.source, out.from, s.source->placement);
    if (has_cluster) out.cluster_source = source_clause(*s.group_by->cluster_source, out.from, SourcePlacement::AfterFrom);

    out.kind = (s.using_clause || s.source || has_cluster) ? QueryKind::CureQL : QueryKind::PureEist;
    if (error_count() != errors_before) return std::nullopt;
    return out;
  }

  std::size_t error_count() const {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; }));
  }
};

}  // namespace

ValidationResult validate(const Statement& stmt, const Catalog& catalog) {
  Validator v(catalog);
  ValidationResult result;
  auto typed = v.statement(stmt);
  result.diagnostics = std::move(v.diags);
  if (typed && !has_errors(result.diagnostics)) result.statement = std::move(typed);
  return result;
}

}  // namespace curelite::cureql
