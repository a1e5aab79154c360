#include "curelite/service/service.hpp"

#include <charconv>
#include <chrono>

#include "curelite/common/error.hpp"
#include "curelite/cureql/diagnostic.hpp"
#include "curelite/engine/script.hpp"
#include "curelite/workflow/serialize.hpp"

namespace curelite::service {

using json = nlohmann::json;
using workflow::Tick;

namespace {

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAssigned: return 403;
    case ErrorCode::UnknownQuery:
    case ErrorCode::UnknownTask:
    case ErrorCode::UnknownCurator:
    case ErrorCode::UnknownSource:
    case ErrorCode::UnknownRelation: return 404;
    case ErrorCode::TaskClosed:
    case ErrorCode::RowBudgetExhausted:
    case ErrorCode::SnapshotGone:
    case ErrorCode::Locked: return 409;
    case ErrorCode::IoFailure: return 500;
    default: return 400;
  }
}

Response error(ErrorCode code, const std::string& message) {
  return {status_of(code), json{{"error", std::string(to_string(code))}, {"message", message}}};
}

json diagnostics_json(const std::vector<cureql::Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) {
    out.push_back({{"severity", d.severity == cureql::Severity::Error ? "error" : "warning"},
                   {"code", d.code},
                   {"message", d.message},
                   {"line", d.line},
                   {"column", d.column}});
  }
  return out;
}

std::optional<std::uint64_t> parse_id(const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto at = path.find('/', start);
    auto piece = path.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start);
    if (!piece.empty()) out.emplace_back(piece);
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

eist::ReliabilityMode parse_mode(const json& body) {
  if (!body.contains("mode") || body["mode"].is_null()) return eist::ReliabilityMode::Probabilistic;
  const auto m = body["mode"].get<std::string>();
  if (m == "prob" || m == "probabilistic") return eist::ReliabilityMode::Probabilistic;
  if (m == "fuzzy") return eist::ReliabilityMode::Fuzzy;
  throw Error(ErrorCode::InvalidArgument, "mode must be prob or fuzzy");
}

std::string mode_name(eist::ReliabilityMode m) { return m == eist::ReliabilityMode::Fuzzy ? "fuzzy" : "prob"; }

std::vector<eist::BaseType> types_of(const eist::Schema& schema) {
  std::vector<eist::BaseType> out;
  for (const auto& a : schema.attributes()) out.push_back(a.type);
  return out;
}

std::string action_name(workflow::Submission::Action a) {
  switch (a) {
    case workflow::Submission::Action::Values: return "payload";
    case workflow::Submission::Action::Approve: return "approve";
    case workflow::Submission::Action::Amend: return "amend";
  }
  return "payload";
}

Tick wall_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

}  // namespace

json to_json(const engine::ResultSet& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row{{"values", workflow::row_to_json(r.values)},
             {"lineage", r.provenance},
             {"p_reliability", r.p_reliability},
             {"f_reliability", r.f_reliability}};
    if (r.partition) row["partition"] = workflow::row_to_json(*r.partition);
    rows.push_back(std::move(row));
  }
  return json{{"columns", result.columns},
              {"partition_columns", result.partition_columns},
              {"mode", mode_name(result.mode)},
              {"snapshot", result.snapshot_id},
              {"rows", std::move(rows)}};
}

std::optional<eist::SourceId> resolve_source(const eist::SourceRegistry& sources, const std::string& text) {
  if (auto n = parse_id(text)) {
    if (*n >= 1 && *n <= sources.size()) return sources.from_ordinal(static_cast<std::uint32_t>(*n));
    return std::nullopt;
  }
  auto id = sources.find_by_name(text);
  if (id && id->is_truth()) return std::nullopt;
  return id;
}

eist::Row row_for(const json& values, const std::vector<eist::BaseType>& types) {
  const json array = values.is_array() ? values : json::array({values});
  if (array.size() != types.size()) {
    throw Error(ErrorCode::SchemaMismatch,
                "expected " + std::to_string(types.size()) + " values, got " + std::to_string(array.size()));
  }
  eist::Row out;
  for (std::size_t i = 0; i < array.size(); ++i) {
    if (types[i] == eist::BaseType::Date && array[i].is_string()) {
      auto d = eist::Date::parse(array[i].get<std::string>());
      if (!d) throw Error(ErrorCode::SchemaMismatch, "not a date: " + array[i].get<std::string>());
      out.emplace_back(*d);
      continue;
    }
    try {
      out.push_back(workflow::value_from_json(array[i]));
    } catch (const Error&) {
      throw Error(ErrorCode::SchemaMismatch, "not a cell value: " + array[i].dump());
    }
  }
  return out;
}

Service::Service(storage::Stored initial, Options options)
    : db_(std::make_unique<engine::Database>(std::move(initial.db))), options_(std::move(options)) {
  if (!options_.clock) options_.clock = wall_seconds;
  workflow_ = std::make_unique<workflow::Workflow>(*db_);
  for (const auto& q : initial.workflow.queries) logical_now_ = std::max(logical_now_, q.started_at);
  for (const auto& t : initial.workflow.tasks) logical_now_ = std::max(logical_now_, t.created_at);
  workflow_->restore(std::move(initial.workflow));
}

void Service::set_journal(std::function<void(const std::string&)> sink) {
  std::lock_guard lock(mutex_);
  sink_ = std::move(sink);
}

Tick Service::now() const {
  std::lock_guard lock(mutex_);
  return options_.simulation ? logical_now_ : options_.clock();
}

storage::Stored Service::state() const {
  std::lock_guard lock(mutex_);
  return {*db_->snapshot(), workflow_->state()};
}

void Service::journal(const json& entry) {
  if (sink_) sink_(entry.dump());
}

void Service::advance_wall_clock() {
  if (options_.simulation) return;
  const Tick t = options_.clock();
  auto collecting = [&] {
    std::size_t n = 0;
    for (const auto& q : workflow_->state().queries) n += q.status == workflow::QueryStatus::Collecting;
    return n;
  };
  const auto before = collecting();
  const auto changes = workflow_->tick(t);
  if (!changes.empty() || collecting() != before) journal({{"op", "tick"}, {"now", t}});
}

Response Service::handle(std::string_view method, std::string_view path, const std::string& body) {
  std::lock_guard lock(mutex_);
  try {
    json parsed = json::object();
    if (!body.empty()) {
      parsed = json::parse(body, nullptr, false);
      if (parsed.is_discarded()) return error(ErrorCode::InvalidArgument, "request body is not JSON");
    }
    advance_wall_clock();
    return route(method, split_path(path), parsed);
  } catch (const cureql::DiagnosticError& e) {
    auto r = error(e.code(), e.what());
    r.body["diagnostics"] = diagnostics_json(e.diagnostics());
    return r;
  } catch (const Error& e) {
    return error(e.code(), e.what());
  } catch (const json::exception& e) {
    return error(ErrorCode::InvalidArgument, std::string("malformed request: ") + e.what());
  }
}

Response Service::route(std::string_view method, const std::vector<std::string>& parts, const json& body) {
  const auto n = parts.size();
  auto is = [&](std::string_view m, std::size_t len, std::string_view first) {
    return method == m && n == len && parts[0] == first;
  };
  if (is("POST", 1, "queries")) return post_query(body);
  if (is("GET", 1, "queries")) {
    json out = json::array();
    for (const auto& q : workflow_->state().queries) out.push_back(query_view(q.id));
    return {200, json{{"queries", out}}};
  }
  if (is("GET", 2, "queries")) {
    auto id = parse_id(parts[1]);
    if (!id) return error(ErrorCode::UnknownQuery, "no query " + parts[1]);
    return {200, query_view(*id)};
  }
  if (is("GET", 3, "queries") && parts[2] == "tasks") {
    auto id = parse_id(parts[1]);
    if (!id) return error(ErrorCode::UnknownQuery, "no query " + parts[1]);
    workflow_->query(*id);
    json out = json::array();
    for (const auto& t : workflow_->tasks_of(*id)) out.push_back(task_view(t));
    return {200, json{{"tasks", out}}};
  }
  if (is("GET", 3, "curators") && parts[2] == "tasks") {
    auto snap = db_->snapshot();
    auto who = resolve_source(snap->sources, parts[1]);
    if (!who) return error(ErrorCode::UnknownCurator, "no curator " + parts[1]);
    json out = json::array();
    for (const auto& t : workflow_->visible_tasks(*who, now())) out.push_back(task_view(t));
    return {200, json{{"curator", snap->sources.display_name(*who)}, {"now", now()}, {"tasks", out}}};
  }
  if (is("GET", 2, "tasks")) {
    auto id = parse_id(parts[1]);
    auto t = id ? workflow_->task(*id) : std::nullopt;
    if (!t) return error(ErrorCode::UnknownTask, "no task " + parts[1]);
    return {200, task_view(*t)};
  }
  if (is("POST", 3, "tasks") && parts[2] == "submission") {
    auto id = parse_id(parts[1]);
    if (!id) return error(ErrorCode::UnknownTask, "no task " + parts[1]);
    return post_submission(*id, body);
  }
  if (is("GET", 1, "sources")) {
    const auto snap = db_->snapshot();
    json out = json::array();
    for (const auto& p : snap->sources.profiles()) {
      out.push_back({{"id", p.source.value()},
                     {"name", snap->sources.display_name(p.source)},
                     {"kind", p.kind == eist::SourceKind::Curator ? "curator" : "extractor"},
                     {"reliability", p.reliability},
                     {"override", p.overridden ? json(*p.overridden) : json(nullptr)},
                     {"effective", p.effective()},
                     {"confirmed", p.confirmed},
                     {"resolved", p.resolved}});
    }
    return {200, json{{"sources", out}, {"truth", {{"id", "T"}, {"ordinal", snap->sources.size() + 1}, {"reliability", 1.0}}}}};
  }
  if (method == "PUT" && n == 3 && parts[0] == "sources" && parts[2] == "reliability") {
    return put_reliability(parts[1], body);
  }
  if (is("POST", 1, "whatif")) return post_whatif(body);
  if (method == "POST" && n == 2 && parts[0] == "admin" && parts[1] == "tick") return post_tick(body);
  std::string joined;
  for (const auto& part : parts) joined += "/" + part;
  return {404, json{{"error", "NoRoute"}, {"message", "no route for " + std::string(method) + " " + joined}}};
}

json Service::task_view(const workflow::Task& task) const {
  auto snap = db_->snapshot();
  json j = workflow::to_json(task);
  json names = json::array();
  for (auto id : task.assigned) names.push_back(snap->sources.display_name(id));
  j["assigned_names"] = names;
  if (task.candidate) {
    json who = json::array();
    for (auto id : task.candidate->contributors) who.push_back(snap->sources.display_name(id));
    j["candidate"]["contributor_names"] = who;
  }
  json columns = json::array();
  if (auto it = snap->relations.find(task.relation); it != snap->relations.end()) {
    const auto& schema = it->second->schema();
    for (std::size_t i = 0; i < schema.arity(); ++i) {
      const auto& a = schema.attributes()[i];
      columns.push_back({{"name", a.name},
                         {"type", std::string(eist::to_string(a.type))},
                         {"crowd", schema.is_crowd_column(i) || schema.crowd_table()},
                         {"key", schema.is_key_column(i)}});
    }
  }
  j["columns"] = columns;
  return j;
}

json Service::query_view(std::uint64_t id) const {
  const auto q = workflow_->query(id);
  json j{{"query_id", q.id},
         {"text", q.text},
         {"mode", mode_name(q.mode)},
         {"created_at", q.started_at},
         {"limits",
          {{"time", q.limits.time ? json(*q.limits.time) : json(nullptr)},
           {"rows", q.limits.rows ? json(*q.limits.rows) : json(nullptr)}}},
         {"collection", std::string(workflow::to_string(q.status))},
         {"close_reason", q.close_reason},
         {"accepted", q.accepted}};
  if (!q.ready()) {
    j["status"] = "collecting";
    return j;
  }
  try {
    j["result"] = to_json(engine::evaluate(workflow_->plan(id), db_->snapshot(), q.mode));
    j["status"] = "ready";
  } catch (const Error& e) {
    j["status"] = "failed";
    j["error"] = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  }
  return j;
}

Response Service::post_query(const json& body) {
  json entry{{"op", "query"},
             {"text", body.at("text").get<std::string>()},
             {"mode", mode_name(parse_mode(body))},
             {"params", body.value("params", json::object())},
             {"now", now()}};
  std::vector<cureql::Diagnostic> warnings;
  const auto id = [&] {
    auto snap = db_->snapshot();
    auto q = engine::compile_select(entry["text"].get<std::string>(), snap->catalog, &warnings);
    return workflow_->start(entry["text"], engine::plan(q, *snap),
                            entry["params"].get<std::map<std::string, std::int64_t>>(), parse_mode(entry),
                            entry["now"].get<Tick>());
  }();
  journal(entry);
  json out = query_view(id);
  if (!warnings.empty()) out["warnings"] = diagnostics_json(warnings);
  return {201, out};
}

Response Service::post_submission(std::uint64_t task_id, const json& body) {
  auto snap = db_->snapshot();
  const auto curator_text = body.at("curator").is_number() ? std::to_string(body["curator"].get<std::uint64_t>())
                                                            : body["curator"].get<std::string>();
  auto who = resolve_source(snap->sources, curator_text);
  if (!who) return error(ErrorCode::UnknownCurator, "no curator " + curator_text);
  auto task = workflow_->task(task_id);
  if (!task) return error(ErrorCode::UnknownTask, "no task " + std::to_string(task_id));

  workflow::Submission s;
  json raw;
  if (body.value("approve", false)) {
    s.action = workflow::Submission::Action::Approve;
  } else if (body.contains("amend")) {
    s.action = workflow::Submission::Action::Amend;
    raw = body["amend"];
  } else if (body.contains("payload")) {
    s.action = workflow::Submission::Action::Values;
    raw = body["payload"];
  } else {
    return error(ErrorCode::InvalidArgument, "a submission needs payload, approve or amend");
  }
  if (s.action != workflow::Submission::Action::Approve) {
    const auto types = types_of(snap->relation(task->relation).schema());
    s.values = task->column ? row_for(raw, {types[*task->column]}) : row_for(raw, types);
  }
  json entry{{"op", "submit"},
             {"task", task_id},
             {"curator", who->value()},
             {"action", action_name(s.action)},
             {"values", workflow::row_to_json(s.values)},
             {"now", now()}};
  auto result = workflow_->submit(task_id, *who, s, entry["now"].get<Tick>());
  journal(entry);
  json finalized = json::array();
  for (const auto& r : result.finalized) finalized.push_back(workflow::row_to_json(r));
  return {200, json{{"task", task_view(result.task)},
                    {"created", result.created},
                    {"finalized", finalized},
                    {"query_closed", result.query_closed}}};
}

Response Service::put_reliability(const std::string& source, const json& body) {
  if (source == "T") return error(ErrorCode::InvalidArgument, "the reliability of T is fixed at 1");
  auto snap = db_->snapshot();
  auto who = resolve_source(snap->sources, source);
  if (!who) return error(ErrorCode::UnknownSource, "no source " + source);
  std::optional<double> value;
  if (!body.at("value").is_null()) value = body["value"].get<double>();
  db_->set_override(*who, value);
  journal({{"op", "override"}, {"source", who->value()}, {"value", value ? json(*value) : json(nullptr)}});
  const auto& p = db_->snapshot()->sources.profile(*who);
  return {200, json{{"id", who->value()}, {"name", db_->snapshot()->sources.display_name(*who)}, {"effective", p.effective()}}};
}

Response Service::post_whatif(const json& body) {
  auto snap = db_->snapshot();
  engine::Plan p;
  auto mode = parse_mode(body);
  if (body.contains("query_id")) {
    const auto id = body["query_id"].get<std::uint64_t>();
    const auto q = workflow_->query(id);
    p = workflow_->plan(id);
    if (!body.contains("mode")) mode = q.mode;
  } else {
    p = engine::plan(engine::compile_select(body.at("text").get<std::string>(), snap->catalog), *snap);
  }
  engine::Overrides overrides;
  const json given = body.value("overrides", json::object());
  for (const auto& [name, value] : given.items()) {
    auto id = name == "T" ? std::optional<eist::SourceId>(eist::SourceId::truth()) : resolve_source(snap->sources, name);
    if (!id) return error(ErrorCode::UnknownOverrideSource, "no source " + name);
    overrides[*id] = value.get<double>();
  }
  return {200, to_json(engine::whatif(p, overrides, snap, mode))};
}

Response Service::post_tick(const json& body) {
  if (!options_.simulation) return error(ErrorCode::InvalidArgument, "the clock only moves by request in simulation mode");
  const Tick target = body.contains("now") ? body["now"].get<Tick>() : logical_now_ + 1;
  if (target < logical_now_) {
    return error(ErrorCode::InvalidArgument, "the clock cannot move back from " + std::to_string(logical_now_));
  }
  logical_now_ = target;
  auto changes = workflow_->tick(target);
  journal({{"op", "tick"}, {"now", target}});
  json out = json::array();
  for (const auto& c : changes) {
    out.push_back({{"task", c.task}, {"from", std::string(workflow::to_string(c.from))}, {"to", std::string(workflow::to_string(c.to))}});
  }
  return {200, json{{"now", target}, {"changes", out}}};
}

void Service::apply(const json& e) {
  const auto op = e.at("op").get<std::string>();
  if (op == "query") {
    auto snap = db_->snapshot();
    const auto text = e.at("text").get<std::string>();
    const auto mode = e.at("mode") == "fuzzy" ? eist::ReliabilityMode::Fuzzy : eist::ReliabilityMode::Probabilistic;
    workflow_->start(text, engine::plan(engine::compile_select(text, snap->catalog), *snap),
                     e.at("params").get<std::map<std::string, std::int64_t>>(), mode, e.at("now").get<Tick>());
    logical_now_ = std::max(logical_now_, e["now"].get<Tick>());
  } else if (op == "submit") {
    workflow::Submission s;
    const auto action = e.at("action").get<std::string>();
    s.action = action == "approve" ? workflow::Submission::Action::Approve
               : action == "amend" ? workflow::Submission::Action::Amend
                                   : workflow::Submission::Action::Values;
    s.values = workflow::row_from_json(e.at("values"));
    workflow_->submit(e.at("task").get<std::uint64_t>(), eist::SourceId(e.at("curator").get<std::uint32_t>()), s,
                      e.at("now").get<Tick>());
    logical_now_ = std::max(logical_now_, e["now"].get<Tick>());
  } else if (op == "override") {
    std::optional<double> value;
    if (!e.at("value").is_null()) value = e["value"].get<double>();
    db_->set_override(eist::SourceId(e.at("source").get<std::uint32_t>()), value);
  } else if (op == "tick") {
    logical_now_ = std::max(logical_now_, e.at("now").get<Tick>());
    workflow_->tick(e["now"].get<Tick>());
  } else {
    throw Error(ErrorCode::CorruptFile, "unknown journal op '" + op + "'");
  }
}

void Service::replay(const std::string& line) {
  std::lock_guard lock(mutex_);
  auto e = json::parse(line, nullptr, false);
  if (e.is_discarded() || !e.is_object()) throw Error(ErrorCode::CorruptFile, "journal line is not a JSON object");
  try {
    apply(e);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::CorruptFile, std::string("journal line: ") + ex.what());
  }
}

}  // namespace curelite::service
