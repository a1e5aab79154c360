#include "curelite/engine/evaluate.hpp"

#include <algorithm>
#include <cstdio>

#include "curelite/common/error.hpp"
#include "curelite/eist/lineage_text.hpp"

namespace curelite::engine {

using cureql::BoundColumn;
using cureql::CompareOp;
using cureql::TypedComparison;

namespace {

// One intermediate tuple: a row per FROM binding (null where not yet joined).
struct Wide {
  std::vector<const eist::Row*> parts;
  eist::Lineage lineage;
  std::optional<eist::Row> partition;
};

struct Context {
  const DatabaseState& db;
  std::size_t width;
  const std::map<std::size_t, eist::Row>* outer;
};

const eist::Value& operand_value(const cureql::TypedOperand& op, const Wide& w, const Context& ctx) {
  if (const auto* b = std::get_if<BoundColumn>(&op)) return (*w.parts[b->binding])[b->attribute];
  if (const auto* o = std::get_if<cureql::OuterColumn>(&op)) {
    auto it = ctx.outer ? ctx.outer->find(o->binding) : std::map<std::size_t, eist::Row>::const_iterator{};
    if (!ctx.outer || it == ctx.outer->end()) {
      throw Error(ErrorCode::InvalidArgument, "correlated reference '" + o->name + "' has no outer row");
    }
    return it->second[o->attribute];
  }
  return std::get<eist::Value>(op);
}

// A comparison touching a CNULL cell is unknown and never holds.
bool holds(const TypedComparison& c, const Wide& w, const Context& ctx) {
  const auto& a = operand_value(c.lhs, w, ctx);
  const auto& b = operand_value(c.rhs, w, ctx);
  if (eist::is_cnull(a) || eist::is_cnull(b)) return false;
  switch (c.op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
  }
  return false;
}

std::vector<Wide> run(const PlanNode& node, const Context& ctx) {
  switch (node.kind) {
    case PlanNode::Kind::Scan: {
      std::vector<Wide> out;
      const auto& rel = ctx.db.relation(node.relation);
      for (const auto* part : {&rel.facts(), &rel.predict()}) {
        for (const auto& t : *part) {
          Wide w{std::vector<const eist::Row*>(ctx.width, nullptr), t.lineage, std::nullopt};
          w.parts[node.binding] = &t.values;
          out.push_back(std::move(w));
        }
      }
      return out;
    }
    case PlanNode::Kind::Select: {
      auto in = run(node.children[0], ctx);
      std::vector<Wide> out;
      for (auto& w : in) {
        if (std::all_of(node.predicates.begin(), node.predicates.end(),
                        [&](const TypedComparison& c) { return holds(c, w, ctx); })) {
          out.push_back(std::move(w));
        }
      }
      return out;
    }
    case PlanNode::Kind::Join: {
      auto left = run(node.children[0], ctx);
      auto right = run(node.children[1], ctx);
      std::vector<Wide> out;
      for (const auto& l : left) {
        for (const auto& r : right) {
          Wide w{l.parts, eist::lineage_and(l.lineage, r.lineage), std::nullopt};
          for (std::size_t i = 0; i < ctx.width; ++i) {
            if (r.parts[i]) w.parts[i] = r.parts[i];
          }
          if (std::all_of(node.predicates.begin(), node.predicates.end(),
                          [&](const TypedComparison& c) { return holds(c, w, ctx); })) {
            out.push_back(std::move(w));
          }
        }
      }
      return out;
    }
    case PlanNode::Kind::GroupPartition: {
      auto in = run(node.children[0], ctx);
      for (auto& w : in) {
        eist::Row label;
        for (const auto& c : node.columns) label.push_back((*w.parts[c.binding])[c.attribute]);
        w.partition = std::move(label);
      }
      return in;
    }
    case PlanNode::Kind::Project:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "Project must be the plan root");
}

struct Projected {
  eist::Row values;
  std::optional<eist::Row> partition;
  eist::Lineage lineage;
};

// Set-semantics projection; rows with CNULL in an output column are dropped
// and equal rows merge their lineage disjunctively.
std::vector<Projected> project(const PlanNode& root, const Context& ctx) {
  auto in = run(root.children[0], ctx);
  std::vector<Projected> rows;
  for (const auto& w : in) {
    eist::Row values;
    bool has_cnull = false;
    for (const auto& c : root.columns) {
      const auto& v = (*w.parts[c.binding])[c.attribute];
      has_cnull = has_cnull || eist::is_cnull(v);
      values.push_back(v);
    }
    if (has_cnull) continue;
    rows.push_back(Projected{std::move(values), w.partition, w.lineage});
  }
  std::sort(rows.begin(), rows.end(), [](const Projected& a, const Projected& b) {
    return std::tie(a.values, a.partition) < std::tie(b.values, b.partition);
  });
  std::vector<Projected> merged;
  for (auto& r : rows) {
    if (!merged.empty() && merged.back().values == r.values && merged.back().partition == r.partition) {
      merged.back().lineage = eist::lineage_or(merged.back().lineage, r.lineage);
    } else {
      merged.push_back(std::move(r));
    }
  }
  return merged;
}

eist::Reliabilities reliabilities_with(const eist::SourceRegistry& sources, const Overrides& overrides) {
  auto table = sources.effective_reliabilities();
  for (const auto& [id, value] : overrides) {
    if (id.is_truth() || !sources.contains(id)) {
      throw Error(ErrorCode::UnknownOverrideSource,
                  id.is_truth() ? "T cannot be overridden" : "source " + std::to_string(id.value()) + " is not registered");
    }
    if (!(value > 0.0 && value <= 1.0)) {
      throw Error(ErrorCode::InvalidReliability, "override must lie in (0,1]");
    }
    table[id] = value;
  }
  return table;
}

}  // namespace

std::string provenance(const eist::Lineage& lineage, const eist::SourceRegistry& sources) {
  return eist::render_provenance(lineage, [&](eist::SourceId id) { return sources.display_name(id); });
}

ResultSet evaluate(const Plan& plan, const Snapshot& snapshot, eist::ReliabilityMode mode, const Overrides& overrides) {
  const DatabaseState& db = *snapshot;
  const auto table = reliabilities_with(db.sources, overrides);
  const auto lookup = eist::lookup_from(table);

  ResultSet out;
  out.mode = mode;
  out.snapshot_id = snapshot.id();
  out.columns = plan.query.output_names();
  for (const auto& c : plan.query.group_by) out.partition_columns.push_back(c.name);

  Context ctx{db, plan.query.from.size(), nullptr};
  for (auto& r : project(plan.evaluation, ctx)) {
    ResultRow row;
    row.values = std::move(r.values);
    row.partition = std::move(r.partition);
    row.p_reliability = eist::reliability_prob(r.lineage, lookup);
    row.f_reliability = eist::reliability_fuzzy(r.lineage, lookup);
    row.provenance = provenance(r.lineage, db.sources);
    row.lineage = std::move(r.lineage);
    out.rows.push_back(std::move(row));
  }
  return out;
}

ResultSet whatif(const Plan& plan, const Overrides& overrides, const Snapshot& snapshot, eist::ReliabilityMode mode) {
  return evaluate(plan, snapshot, mode, overrides);
}

std::vector<eist::Row> level_rows(const cureql::TypedSelect& query, const DatabaseState& db,
                                  const std::map<std::size_t, eist::Row>& outer) {
  Plan p = plan(query, db);
  Context ctx{db, query.from.size(), &outer};
  std::vector<eist::Row> rows;
  for (auto& r : project(p.evaluation, ctx)) rows.push_back(std::move(r.values));
  return rows;
}

std::string format_reliability(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", r);
  return buf;
}

std::string format_table(const ResultSet& result) {
  std::vector<std::string> header = result.columns;
  for (const auto& c : result.partition_columns) header.push_back("group:" + c);
  header.insert(header.end(), {"lineage", "p_reliability", "f_reliability"});

  std::vector<std::vector<std::string>> cells;
  for (const auto& row : result.rows) {
    std::vector<std::string> line;
    for (const auto& v : row.values) line.push_back(eist::render_value(v));
    if (row.partition) {
      for (const auto& v : *row.partition) line.push_back(eist::render_value(v));
    }
    line.push_back(row.provenance);
    line.push_back(format_reliability(row.p_reliability));
    line.push_back(format_reliability(row.f_reliability));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size() && i < width.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string s;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) s += "  ";
      s += line[i];
      if (i + 1 < line.size()) s.append(width[i] - line[i].size(), ' ');
    }
    return s + "\n";
  };
  std::string out = emit(header);
  for (const auto& line : cells) out += emit(line);
  out += "(" + std::to_string(result.rows.size()) + (result.rows.size() == 1 ? " row)\n" : " rows)\n");
  return out;
}

}  // namespace curelite::engine
