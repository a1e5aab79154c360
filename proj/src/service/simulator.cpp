#include "curelite/service/simulator.hpp"

#include <set>

#include "curelite/common/error.hpp"
#include "curelite/cureql/parser.hpp"
#include "curelite/cureql/printer.hpp"
#include "curelite/workflow/serialize.hpp"

namespace curelite::service {

using json = nlohmann::json;
using workflow::Tick;

namespace {

BotAction::Do parse_do(const std::string& s) {
  if (s == "approve") return BotAction::Do::Approve;
  if (s == "amend") return BotAction::Do::Amend;
  if (s == "submit") return BotAction::Do::Submit;
  if (s == "skip") return BotAction::Do::Skip;
  throw Error(ErrorCode::InvalidArgument, "unknown bot action '" + s + "'");
}

bool value_matches(const eist::Value& v, const json& want) {
  if (want.is_string()) return !eist::is_cnull(v) && eist::render_value(v) == want.get<std::string>();
  if (want.is_number()) return std::holds_alternative<double>(v) && std::get<double>(v) == want.get<double>();
  if (want.is_null()) return eist::is_cnull(v);
  return false;
}

struct Bot {
  std::string name;
  const std::vector<BotAction>* actions = nullptr;
  std::size_t next = 0;
  int remaining = 0;
  Tick ready_at = 0;
  std::set<std::uint64_t> skipped;

  bool done() const { return next >= actions->size(); }
  // Finite work remains.
  bool pending() const {
    for (std::size_t i = next; i < actions->size(); ++i) {
      if ((*actions)[i].repeat >= 0) return true;
    }
    return false;
  }
  void consume(Tick now) {
    if (remaining > 0 && --remaining > 0) return;
    if (remaining < 0) return;
    if (++next < actions->size()) {
      remaining = (*actions)[next].repeat;
      ready_at = now + (*actions)[next].delay;
    }
  }
};

json task_row(const json& task) {
  if (!task["candidate"].is_null()) return task["candidate"]["values"];
  if (!task["original"].is_null()) return task["original"];
  return json();
}

bool matches(const BotAction& a, const json& task, const std::vector<std::uint64_t>& queries) {
  if (a.kind && task["kind"] != *a.kind) return false;
  if (a.level && task["level"].get<std::size_t>() != *a.level) return false;
  if (a.query && (*a.query == 0 || *a.query > queries.size() || task["query"].get<std::uint64_t>() != queries[*a.query - 1])) {
    return false;
  }
  if (a.where.empty()) return true;
  const json row = task_row(task);
  if (row.is_null()) return false;
  const auto values = workflow::row_from_json(row);
  for (const auto& [column, want] : a.where) {
    bool found = false;
    for (std::size_t i = 0; i < task["columns"].size(); ++i) {
      if (task["columns"][i]["name"] == column) {
        found = value_matches(values[i], want);
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

json amended(const BotAction& a, const json& task) {
  if (!a.values.is_object()) return a.values;
  json row = task_row(task);
  if (!task["column"].is_null()) {
    // Cell review: only the reviewed column matters.
    const auto col = task["column"].get<std::size_t>();
    const auto name = task["columns"][col]["name"].get<std::string>();
    return a.values.contains(name) ? a.values[name] : row[col];
  }
  for (std::size_t i = 0; i < task["columns"].size(); ++i) {
    const auto name = task["columns"][i]["name"].get<std::string>();
    if (a.values.contains(name)) row[i] = a.values[name];
  }
  return row;
}

std::string describe(const json& task) {
  std::string s = "task " + std::to_string(task["id"].get<std::uint64_t>()) + " (" + task["kind"].get<std::string>() +
                  " L" + std::to_string(task["level"].get<std::size_t>());
  const json row = task_row(task);
  if (!row.is_null()) {
    s += " ";
    const auto values = workflow::row_from_json(row);
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + eist::render_value(values[i]);
  }
  return s + ")";
}

}  // namespace

BotScript parse_bot_script(const json& j) {
  BotScript out;
  if (!j.is_object() || !j.contains("curators") || !j["curators"].is_object()) {
    throw Error(ErrorCode::InvalidArgument, "a bot script is an object with a \"curators\" map");
  }
  out.max_ticks = j.value("max_ticks", out.max_ticks);
  for (const auto& [name, list] : j["curators"].items()) {
    if (!list.is_array()) throw Error(ErrorCode::InvalidArgument, "actions of " + name + " must be a list");
    auto& actions = out.curators[name];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      const std::string where = name + " action " + std::to_string(i + 1);
      try {
        BotAction a;
        if (e.contains("match")) {
          const auto& m = e["match"];
          if (m.contains("kind")) a.kind = m["kind"].get<std::string>();
          if (m.contains("level")) a.level = m["level"].get<std::size_t>();
          if (m.contains("query")) a.query = m["query"].get<std::size_t>();
          if (m.contains("where")) {
            for (const auto& [col, v] : m["where"].items()) a.where[col] = v;
          }
        }
        a.action = parse_do(e.at("do").get<std::string>());
        a.values = e.value("values", json());
        a.delay = e.value("delay", Tick{0});
        a.repeat = e.value("repeat", 1);
        if (a.delay < 0 || a.repeat == 0 || a.repeat < -1) throw Error(ErrorCode::InvalidArgument, "bad delay or repeat");
        if ((a.action == BotAction::Do::Submit || a.action == BotAction::Do::Amend) && a.values.is_null()) {
          throw Error(ErrorCode::InvalidArgument, "submit and amend need values");
        }
        actions.push_back(std::move(a));
      } catch (const json::exception& ex) {
        throw Error(ErrorCode::InvalidArgument, where + ": " + ex.what());
      } catch (const Error& ex) {
        throw Error(ErrorCode::InvalidArgument, where + ": " + ex.what());
      }
    }
  }
  return out;
}

std::vector<std::string> split_queries(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& stmt : cureql::parse_script(text)) out.push_back(cureql::pretty_print(stmt));
  return out;
}

SimulationReport simulate(Service& service, const BotScript& script, const std::vector<std::string>& queries) {
  SimulationReport report;
  for (const auto& text : queries) {
    auto r = service.handle("POST", "/queries", json{{"text", text}}.dump());
    if (r.status != 201) throw Error(ErrorCode::InvalidArgument, "query rejected: " + r.body.value("message", r.body.dump()));
    report.queries.push_back(r.body["query_id"].get<std::uint64_t>());
  }

  std::vector<Bot> bots;
  Tick now = service.now();
  for (const auto& [name, actions] : script.curators) {
    auto probe = service.handle("GET", "/curators/" + name + "/tasks", "");
    if (probe.status != 200) throw Error(ErrorCode::InvalidArgument, "bot script names unknown curator " + name);
    Bot b;
    b.name = name;
    b.actions = &actions;
    if (!actions.empty()) {
      b.remaining = actions[0].repeat;
      b.ready_at = now + actions[0].delay;
    }
    bots.push_back(std::move(b));
  }

  auto all_closed = [&] {
    for (auto id : report.queries) {
      auto q = service.handle("GET", "/queries/" + std::to_string(id), "");
      if (q.body["collection"] != "closed") return false;
    }
    return true;
  };
  auto timed_open = [&] {
    for (auto id : report.queries) {
      auto q = service.handle("GET", "/queries/" + std::to_string(id), "");
      if (q.body["collection"] != "closed" && !q.body["limits"]["time"].is_null()) return true;
    }
    return false;
  };
  auto trace = [&](const std::string& line) { report.trace.push_back("t=" + std::to_string(now) + " " + line); };

  for (;;) {
    for (bool progress = true; progress;) {
      progress = false;
      for (auto& bot : bots) {
        if (bot.done() || now < bot.ready_at) continue;
        const auto& action = (*bot.actions)[bot.next];
        auto inbox = service.handle("GET", "/curators/" + bot.name + "/tasks", "").body["tasks"];
        for (const auto& t : inbox) {
          if (t["parent"].is_null() || t["level"].get<std::size_t>() < 2) continue;
          auto parent = service.workflow().task(t["parent"].get<std::uint64_t>());
          if (parent && parent->is_open()) {
            report.violations.push_back("t=" + std::to_string(now) + " " + bot.name + " sees " + describe(t) +
                                        " before task " + std::to_string(parent->id) + " closed");
          }
        }
        const json* chosen = nullptr;
        for (const auto& t : inbox) {
          if (!bot.skipped.count(t["id"].get<std::uint64_t>()) && matches(action, t, report.queries)) {
            chosen = &t;
            break;
          }
        }
        if (!chosen) continue;
        const auto id = (*chosen)["id"].get<std::uint64_t>();
        const auto path = "/tasks/" + std::to_string(id) + "/submission";
        if (action.action == BotAction::Do::Skip) {
          bot.skipped.insert(id);
          trace(bot.name + " skips " + describe(*chosen));
        } else {
          json body{{"curator", bot.name}};
          std::string verb;
          switch (action.action) {
            case BotAction::Do::Approve: body["approve"] = true; verb = "approves"; break;
            case BotAction::Do::Amend: body["amend"] = amended(action, *chosen); verb = "amends"; break;
            default: body["payload"] = action.values; verb = "submits"; break;
          }
          auto r = service.handle("POST", path, body.dump());
          if (r.status != 200) {
            bot.skipped.insert(id);
            trace(bot.name + " " + verb + " " + describe(*chosen) + " -> " + r.body.value("error", "error"));
            progress = true;
            continue;
          }
          std::string line = bot.name + " " + verb + " " + describe(*chosen);
          if (!r.body["created"].empty()) line += " -> tasks " + r.body["created"].dump();
          for (const auto& f : r.body["finalized"]) {
            const auto values = workflow::row_from_json(f);
            std::string s;
            for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + eist::render_value(values[i]);
            line += " -> finalized " + s;
          }
          if (r.body["query_closed"].get<bool>()) line += " -> query closed";
          trace(line);
        }
        bot.consume(now);
        progress = true;
      }
    }

    if (all_closed()) break;
    bool pending = false;
    for (const auto& b : bots) pending = pending || b.pending();
    if (!pending && !timed_open()) break;
    if (now >= script.max_ticks) {
      report.stalled = true;
      break;
    }
    auto r = service.handle("POST", "/admin/tick", json{{"now", now + 1}}.dump());
    if (r.status != 200) throw Error(ErrorCode::InvalidArgument, "simulation needs a service in simulation mode");
    now = r.body["now"].get<Tick>();
    for (const auto& c : r.body["changes"]) {
      trace("task " + std::to_string(c["task"].get<std::uint64_t>()) + " " + c["to"].get<std::string>());
    }
  }
  report.finished_at = now;
  return report;
}

}  // namespace curelite::service
