#include "curelite/engine/plan.hpp"

#include <algorithm>
#include <set>

#include "curelite/common/error.hpp"

namespace curelite::engine {

using cureql::BoundColumn;
using cureql::TypedComparison;
using cureql::TypedOperand;

std::string PlanNode::shape() const {
  switch (kind) {
    case Kind::Scan: return "Scan " + relation;
    case Kind::Select: return "Select(" + children[0].shape() + ")";
    case Kind::Project: return "Project(" + children[0].shape() + ")";
    case Kind::GroupPartition: return "GroupPartition(" + children[0].shape() + ")";
    case Kind::Join: return "Join(" + children[0].shape() + ", " + children[1].shape() + ")";
  }
  return "";
}

namespace {

// Bindings referenced by a comparison's own columns.
std::set<std::size_t> bindings_of(const TypedComparison& c) {
  std::set<std::size_t> out;
  for (const auto* op : {&c.lhs, &c.rhs}) {
    if (const auto* b = std::get_if<BoundColumn>(op)) out.insert(b->binding);
  }
  return out;
}

bool is_column_equality(const TypedComparison& c) {
  return c.op == cureql::CompareOp::Eq && std::holds_alternative<BoundColumn>(c.lhs) &&
         std::holds_alternative<BoundColumn>(c.rhs);
}

PlanNode scan(const cureql::FromBinding& b, std::size_t index) {
  PlanNode n;
  n.kind = PlanNode::Kind::Scan;
  n.relation = b.relation;
  n.binding = index;
  return n;
}

PlanNode evaluation_tree(const cureql::TypedSelect& q) {
  std::vector<TypedComparison> remaining = q.where;
  PlanNode tree = scan(q.from[0], 0);
  std::set<std::size_t> joined{0};

  for (std::size_t b = 1; b < q.from.size(); ++b) {
    PlanNode join;
    join.kind = PlanNode::Kind::Join;
    for (auto it = remaining.begin(); it != remaining.end();) {
      const auto bs = bindings_of(*it);
      const bool spans = bs.size() == 2 && bs.count(b) && joined.count(*bs.begin() == b ? *bs.rbegin() : *bs.begin());
      if (is_column_equality(*it) && spans) {
        join.predicates.push_back(*it);
        it = remaining.erase(it);
      } else {
        ++it;
      }
    }
    if (join.predicates.empty()) {
      // No stated condition: natural join on shared attribute names.
      const auto& attrs = q.from[b].schema.attributes();
      for (std::size_t a = 0; a < attrs.size(); ++a) {
        for (std::size_t l : joined) {
          auto other = q.from[l].schema.index_of(attrs[a].name);
          if (!other || q.from[l].schema.attributes()[*other].type != attrs[a].type) continue;
          join.predicates.push_back(TypedComparison{BoundColumn{l, *other, attrs[a].type, attrs[a].name},
                                                    cureql::CompareOp::Eq,
                                                    BoundColumn{b, a, attrs[a].type, attrs[a].name}});
          break;
        }
      }
    }
    join.children.push_back(std::move(tree));
    join.children.push_back(scan(q.from[b], b));
    tree = std::move(join);
    joined.insert(b);
  }

  if (!remaining.empty()) {
    PlanNode sel;
    sel.kind = PlanNode::Kind::Select;
    sel.predicates = std::move(remaining);
    sel.children.push_back(std::move(tree));
    tree = std::move(sel);
  }
  if (!q.group_by.empty()) {
    PlanNode g;
    g.kind = PlanNode::Kind::GroupPartition;
    g.columns = q.group_by;
    g.children.push_back(std::move(tree));
    tree = std::move(g);
  }
  PlanNode proj;
  proj.kind = PlanNode::Kind::Project;
  proj.columns = q.projection;
  proj.children.push_back(std::move(tree));
  return proj;
}

// Columns of binding `b` that the query mentions anywhere.
std::set<std::size_t> touched_columns(const cureql::TypedSelect& q, std::size_t b) {
  std::set<std::size_t> out;
  auto add = [&](const BoundColumn& c) {
    if (c.binding == b) out.insert(c.attribute);
  };
  for (const auto& c : q.projection) add(c);
  for (const auto& c : q.group_by) add(c);
  for (const auto& cmp : q.where) {
    for (const auto* op : {&cmp.lhs, &cmp.rhs}) {
      if (const auto* col = std::get_if<BoundColumn>(op)) add(*col);
    }
  }
  return out;
}

std::vector<CellFillTarget> cell_fills(const cureql::TypedSelect& q, const DatabaseState& db) {
  std::vector<CellFillTarget> out;
  for (std::size_t b : q.crowd_bindings()) {
    const auto& name = q.from[b].relation;
    const auto& rel = db.relation(name);
    const auto& schema = rel.schema();
    for (std::size_t col : touched_columns(q, b)) {
      if (!schema.is_crowd_column(col) && !schema.crowd_table()) continue;
      for (const auto* part : {&rel.facts(), &rel.predict()}) {
        for (const auto& t : *part) {
          if (!eist::is_cnull(t.values[col])) continue;
          CellFillTarget target{name, t.values, col};
          if (std::find(out.begin(), out.end(), target) == out.end()) out.push_back(std::move(target));
        }
      }
    }
  }
  return out;
}

}  // namespace

Plan plan(const cureql::TypedSelect& query, const DatabaseState& db) {
  Plan p;
  p.query = query;
  p.kind = query.kind;
  for (const auto& b : query.from) {
    if (!db.relations.count(b.relation)) throw Error(ErrorCode::UnknownRelation, "unknown relation '" + b.relation + "'");
  }
  p.evaluation = evaluation_tree(query);

  Collection c;
  const auto crowd = query.crowd_bindings();
  if (!crowd.empty()) {
    c.target_binding = crowd.front();
    c.target_relation = query.from[c.target_binding].relation;
  }
  c.cell_fills = cell_fills(query, db);

  if (query.kind == cureql::QueryKind::PureEist) {
    if (c.cell_fills.empty()) return p;
    // Outstanding CNULL cells: ask the open crowd for them.
    p.kind = cureql::QueryKind::CureQL;
    p.collection = std::move(c);
    return p;
  }

  if (query.using_clause && !crowd.empty()) {
    auto it = db.catalog.extractors.find(query.using_clause->tool);
    if (it == db.catalog.extractors.end()) {
      throw Error(ErrorCode::ExtractorMissing, "extraction tool '" + query.using_clause->tool + "' is not registered");
    }
    c.extractor = it->second;
    c.input = query.using_clause->input;
  }
  c.solicit_rows = !c.extractor && !crowd.empty() && query.from[c.target_binding].schema.crowd_table();
  if (query.cluster_source) {
    c.levels = query.cluster_source;
    c.per_group = true;
  } else {
    c.levels = query.source;
  }
  if (c.levels) {
    for (const auto& level : c.levels->levels) {
      if (!level.correlated) continue;
      for (const auto& cmp : level.query->where) {
        for (const auto* op : {&cmp.lhs, &cmp.rhs}) {
          const auto* outer = std::get_if<cureql::OuterColumn>(op);
          if (outer && (crowd.empty() || outer->binding != c.target_binding)) {
            throw Error(ErrorCode::InvalidArgument,
                        "a correlated curator level may only refer to the relation being curated");
          }
        }
      }
    }
  }
  c.group_by = query.group_by;
  c.limits = query.limit;
  p.collection = std::move(c);
  return p;
}

Limits bind_limits(const std::optional<cureql::LimitClause>& clause, const std::map<std::string, std::int64_t>& params) {
  Limits out;
  if (!clause) return out;
  auto bind = [&](const std::optional<cureql::LimitAmount>& a) -> std::optional<std::int64_t> {
    if (!a) return std::nullopt;
    std::int64_t v = 0;
    if (const auto* n = std::get_if<std::int64_t>(&a->value)) {
      v = *n;
    } else {
      const auto& name = std::get<std::string>(a->value);
      auto it = params.find(name);
      if (it == params.end()) throw Error(ErrorCode::InvalidArgument, "LIMIT parameter '" + name + "' is not bound");
      v = it->second;
    }
    if (v <= 0) throw Error(ErrorCode::InvalidArgument, "LIMIT amounts must be positive");
    return v;
  };
  out.time = bind(clause->time);
  out.rows = bind(clause->rows);
  return out;
}

}  // namespace curelite::engine
