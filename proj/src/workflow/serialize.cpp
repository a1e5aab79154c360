#include "curelite/workflow/serialize.hpp"

#include <sstream>

#include "curelite/common/error.hpp"

namespace curelite::workflow {

using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptFile, why); }

json ids_to_json(const std::vector<eist::SourceId>& ids) {
  json out = json::array();
  for (auto id : ids) out.push_back(id.value());
  return out;
}

std::vector<eist::SourceId> ids_from_json(const json& j) {
  std::vector<eist::SourceId> out;
  for (const auto& v : j) {
    const auto n = v.get<std::uint32_t>();
    if (n == 0) corrupt("T cannot appear in a task");
    out.emplace_back(n);
  }
  return out;
}

template <typename T, typename F>
json optional_to_json(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

}  // namespace

json value_to_json(const eist::Value& v) {
  return std::visit(
      [](const auto& x) -> json {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, eist::CNull>) {
          return nullptr;
        } else if constexpr (std::is_same_v<X, eist::Date>) {
          return json{{"date", x.to_string()}};
        } else {
          return x;
        }
      },
      v);
}

eist::Value value_from_json(const json& j) {
  if (j.is_null()) return eist::CNull{};
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("date") && j["date"].is_string()) {
    auto d = eist::Date::parse(j["date"].get<std::string>());
    if (d) return *d;
  }
  corrupt("not a cell value: " + j.dump());
}

json row_to_json(const eist::Row& row) {
  json out = json::array();
  for (const auto& v : row) out.push_back(value_to_json(v));
  return out;
}

eist::Row row_from_json(const json& j) {
  if (!j.is_array()) corrupt("a row must be an array");
  eist::Row out;
  for (const auto& v : j) out.push_back(value_from_json(v));
  return out;
}

json to_json(const Task& t) {
  json j;
  j["id"] = t.id;
  j["query"] = t.query_id;
  j["kind"] = to_string(t.kind);
  j["relation"] = t.relation;
  j["original"] = optional_to_json(t.original, row_to_json);
  j["column"] = optional_to_json(t.column, [](std::size_t c) { return json(c); });
  j["candidate"] = optional_to_json(t.candidate, [](const Candidate& c) {
    return json{{"values", row_to_json(c.values)}, {"contributors", ids_to_json(c.contributors)}};
  });
  j["level"] = t.level;
  j["levels"] = t.levels;
  j["assigned"] = ids_to_json(t.assigned);
  j["state"] = to_string(t.state);
  j["deadline"] = optional_to_json(t.deadline, [](Tick d) { return json(d); });
  j["created_at"] = t.created_at;
  j["parent"] = optional_to_json(t.parent, [](std::uint64_t p) { return json(p); });
  j["submitted_by"] = optional_to_json(t.submitted_by, [](eist::SourceId s) { return json(s.value()); });
  return j;
}

Task task_from_json(const json& j) {
  try {
    Task t;
    t.id = j.at("id").get<std::uint64_t>();
    t.query_id = j.at("query").get<std::uint64_t>();
    auto kind = parse_task_kind(j.at("kind").get<std::string>());
    auto state = parse_task_state(j.at("state").get<std::string>());
    if (!kind || !state) corrupt("bad task kind or state");
    t.kind = *kind;
    t.state = *state;
    t.relation = j.at("relation").get<std::string>();
    if (!j.at("original").is_null()) t.original = row_from_json(j["original"]);
    if (!j.at("column").is_null()) t.column = j["column"].get<std::size_t>();
    if (!j.at("candidate").is_null()) {
      t.candidate = Candidate{row_from_json(j["candidate"].at("values")), ids_from_json(j["candidate"].at("contributors"))};
    }
    t.level = j.at("level").get<std::size_t>();
    t.levels = j.at("levels").get<std::size_t>();
    t.assigned = ids_from_json(j.at("assigned"));
    if (!j.at("deadline").is_null()) t.deadline = j["deadline"].get<Tick>();
    t.created_at = j.at("created_at").get<Tick>();
    if (!j.at("parent").is_null()) t.parent = j["parent"].get<std::uint64_t>();
    if (!j.at("submitted_by").is_null()) t.submitted_by = eist::SourceId(j["submitted_by"].get<std::uint32_t>());
    return t;
  } catch (const json::exception& e) {
    corrupt(std::string("bad task record: ") + e.what());
  }
}

json to_json(const QueryRecord& q) {
  json j;
  j["id"] = q.id;
  j["text"] = q.text;
  j["params"] = q.params;
  j["mode"] = q.mode == eist::ReliabilityMode::Fuzzy ? "fuzzy" : "prob";
  j["limits"] = {{"time", optional_to_json(q.limits.time, [](std::int64_t v) { return json(v); })},
                 {"rows", optional_to_json(q.limits.rows, [](std::int64_t v) { return json(v); })}};
  j["started_at"] = q.started_at;
  j["status"] = to_string(q.status);
  j["close_reason"] = q.close_reason;
  j["accepted"] = q.accepted;
  j["has_collection"] = q.has_collection;
  return j;
}

QueryRecord query_from_json(const json& j) {
  try {
    QueryRecord q;
    q.id = j.at("id").get<std::uint64_t>();
    q.text = j.at("text").get<std::string>();
    q.params = j.at("params").get<std::map<std::string, std::int64_t>>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "prob" && mode != "fuzzy") corrupt("bad mode '" + mode + "'");
    q.mode = mode == "fuzzy" ? eist::ReliabilityMode::Fuzzy : eist::ReliabilityMode::Probabilistic;
    const auto& limits = j.at("limits");
    if (!limits.at("time").is_null()) q.limits.time = limits["time"].get<std::int64_t>();
    if (!limits.at("rows").is_null()) q.limits.rows = limits["rows"].get<std::int64_t>();
    q.started_at = j.at("started_at").get<Tick>();
    const auto status = j.at("status").get<std::string>();
    if (status != "collecting" && status != "closed") corrupt("bad status '" + status + "'");
    q.status = status == "collecting" ? QueryStatus::Collecting : QueryStatus::Closed;
    q.close_reason = j.at("close_reason").get<std::string>();
    q.accepted = j.at("accepted").get<std::size_t>();
    q.has_collection = j.at("has_collection").get<bool>();
    return q;
  } catch (const json::exception& e) {
    corrupt(std::string("bad query record: ") + e.what());
  }
}

std::string to_jsonl(const WorkflowState& state) {
  std::string out = json{{"next_query", state.next_query}, {"next_task", state.next_task}}.dump() + "\n";
  for (const auto& q : state.queries) out += json{{"query", to_json(q)}}.dump() + "\n";
  for (const auto& t : state.tasks) out += json{{"task", to_json(t)}}.dump() + "\n";
  return out;
}

WorkflowState from_jsonl(std::string_view text) {
  WorkflowState state;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!header) {
        state.next_query = j.at("next_query").get<std::uint64_t>();
        state.next_task = j.at("next_task").get<std::uint64_t>();
        header = true;
      } else if (j.contains("query")) {
        state.queries.push_back(query_from_json(j["query"]));
      } else if (j.contains("task")) {
        state.tasks.push_back(task_from_json(j["task"]));
      } else {
        corrupt("unknown record");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptFile, "line " + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptFile, "line " + std::to_string(n) + ": " + e.what());
    }
  }
  return state;
}

}  // namespace curelite::workflow
