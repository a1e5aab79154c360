// curelite: command-line front end for a database directory.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "curelite/common/error.hpp"
#include "curelite/cureql/diagnostic.hpp"
#include "curelite/engine/fixtures.hpp"
#include "curelite/engine/script.hpp"
#include "curelite/service/service.hpp"
#include "curelite/service/simulator.hpp"
#include "curelite/storage/storage.hpp"

using namespace curelite;
namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path database_dir(const std::string& given) {
  if (!given.empty()) return given;
  if (const char* env = std::getenv("CURELITE_DB"); env && *env) return env;
  throw Error(ErrorCode::InvalidArgument, "no database directory given and CURELITE_DB is not set");
}

// Saved state plus whatever a running server journaled since.
storage::Stored open_db(const fs::path& dir, bool simulation = false) {
  service::Service svc(storage::load_db(dir), {simulation, {}});
  for (const auto& line : storage::read_journal(dir)) svc.replay(line);
  return svc.state();
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

void print_sources(const engine::DatabaseState& db) {
  std::vector<std::vector<std::string>> rows{{"id", "source", "kind", "reliability", "override", "confirmed", "resolved"}};
  for (const auto& p : db.sources.profiles()) {
    rows.push_back({std::to_string(p.source.value()), db.sources.display_name(p.source),
                    p.kind == eist::SourceKind::Curator ? "curator" : "extractor", engine::format_reliability(p.reliability),
                    p.overridden ? engine::format_reliability(*p.overridden) : "-", std::to_string(p.confirmed),
                    std::to_string(p.resolved)});
  }
  rows.push_back({std::to_string(db.sources.size() + 1), "T", "system", engine::format_reliability(1.0), "-", "-", "-"});
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) line += i + 1 < r.size() ? pad(r[i], width[i]) + "  " : r[i];
    std::cout << line << "\n";
  }
}

engine::Overrides parse_overrides(const std::vector<std::string>& specs, const eist::SourceRegistry& sources) {
  engine::Overrides out;
  for (const auto& spec : specs) {
    auto eq = spec.rfind('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "override '" + spec + "' is not source=value");
    const auto name = spec.substr(0, eq);
    auto id = name == "T" ? std::optional<eist::SourceId>(eist::SourceId::truth()) : service::resolve_source(sources, name);
    if (!id) throw Error(ErrorCode::UnknownOverrideSource, "no source '" + name + "'");
    double v = 0;
    std::istringstream in(spec.substr(eq + 1));
    if (!(in >> v) || !in.eof()) throw Error(ErrorCode::InvalidArgument, "override '" + spec + "' has no numeric value");
    out[*id] = v;
  }
  return out;
}

eist::ReliabilityMode parse_mode(const std::string& m) {
  return m == "fuzzy" ? eist::ReliabilityMode::Fuzzy : eist::ReliabilityMode::Probabilistic;
}

int run(int argc, char** argv) {
  CLI::App app{"curelite: curated databases with source reliabilities"};
  app.require_subcommand(1);

  std::string dir;
  auto* init = app.add_subcommand("init", "create an empty database directory");
  init->add_option("dir", dir, "database directory (default $CURELITE_DB)");

  std::vector<std::string> load_args;
  auto* load = app.add_subcommand("load", "apply a fixtures directory (sources.tsv, extractors.tsv, *.cql)");
  load->add_option("args", load_args, "[dir] fixtures")->required()->expected(1, 2);

  std::string expr, file, mode = "prob";
  std::vector<std::string> overrides;
  auto* query = app.add_subcommand("query", "evaluate SELECT statements");
  query->add_option("dir", dir, "database directory (default $CURELITE_DB)");
  auto* e_opt = query->add_option("-e,--expr", expr, "query text");
  auto* f_opt = query->add_option("-f,--file", file, "file of queries");
  e_opt->excludes(f_opt);
  query->add_option("--mode", mode, "reliability mode")->check(CLI::IsMember({"prob", "fuzzy"}));
  query->add_option("--override", overrides, "what-if reliability, source=value")->take_all();

  bool sim = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("dir", dir, "database directory (default $CURELITE_DB)");
  serve->add_flag("--sim", sim, "logical clock driven by POST /admin/tick");
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port");

  std::string script_file, queries_file;
  bool show_trace = false;
  auto* simulate = app.add_subcommand("simulate", "run scripted curator bots against queries (nothing is saved)");
  simulate->add_option("dir", dir, "database directory (default $CURELITE_DB)");
  simulate->add_option("--script", script_file, "bot script (JSON)")->required();
  simulate->add_option("--queries", queries_file, "file of queries")->required();
  simulate->add_flag("--trace", show_trace, "print every bot action and expiry");

  auto* sources = app.add_subcommand("sources", "list source profiles");
  sources->add_option("dir", dir, "database directory (default $CURELITE_DB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*init) {
    const auto path = database_dir(dir);
    storage::DirLock lock(path);
    if (fs::exists(path / "meta")) throw Error(ErrorCode::InvalidArgument, path.string() + " already holds a database");
    storage::save_db({}, {}, path);
    std::cout << "initialized " << path.string() << "\n";
    return 0;
  }

  if (*load) {
    const auto path = database_dir(load_args.size() == 2 ? load_args[0] : "");
    storage::DirLock lock(path);
    auto stored = open_db(path);
    engine::Database db(std::move(stored.db));
    auto result = engine::load_fixtures(db, load_args.back());
    for (const auto& w : result.warnings) std::cerr << cureql::render(w) << "\n";
    for (const auto& w : result.write_warnings) std::cerr << "warning: " << w << "\n";
    storage::save_db(*db.snapshot(), stored.workflow, path);
    std::cout << "loaded " << result.statements << " statements into " << path.string() << "\n";
    return 0;
  }

  if (*query) {
    if (expr.empty() && file.empty()) throw Error(ErrorCode::InvalidArgument, "query needs -e or -f");
    const auto path = database_dir(dir);
    auto stored = open_db(path);
    auto snap = std::make_shared<const engine::DatabaseState>(std::move(stored.db));
    const engine::Snapshot snapshot{snap};
    const auto table = parse_overrides(overrides, snap->sources);
    const auto texts = service::split_queries(expr.empty() ? read_text(file) : expr);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      std::vector<cureql::Diagnostic> warnings;
      auto q = engine::compile_select(texts[i], snap->catalog, &warnings);
      for (const auto& w : warnings) std::cerr << cureql::render(w) << "\n";
      auto p = engine::plan(q, *snap);
      if (p.collection) std::cerr << "note: crowd collection runs only under serve or simulate; showing stored rows\n";
      if (i) std::cout << "\n";
      std::cout << engine::format_table(engine::evaluate(p, snapshot, parse_mode(mode), table));
    }
    return 0;
  }

  if (*serve) {
    const auto path = database_dir(dir);
    storage::DirLock lock(path);
    service::Service svc(open_db(path, sim), {sim, {}});
    storage::save_db(svc.state().db, svc.state().workflow, path);
    svc.set_journal([&](const std::string& line) { storage::append_journal(path, line); });
    std::cerr << "serving " << path.string() << " on http://" << host << ":" << port << (sim ? " (simulation clock)" : "")
              << "\n";
    service::serve(svc, host, port);
    const auto final_state = svc.state();
    storage::save_db(final_state.db, final_state.workflow, path);
    std::cerr << "saved " << path.string() << "\n";
    return 0;
  }

  if (*simulate) {
    const auto path = database_dir(dir);
    service::Service svc(open_db(path, true), {true, {}});
    const auto script_json = nlohmann::json::parse(read_text(script_file), nullptr, false);
    if (script_json.is_discarded()) throw Error(ErrorCode::InvalidArgument, script_file + " is not JSON");
    const auto script = service::parse_bot_script(script_json);
    const auto report = service::simulate(svc, script, service::split_queries(read_text(queries_file)));
    if (show_trace) {
      for (const auto& line : report.trace) std::cout << line << "\n";
      std::cout << "\n";
    }
    for (auto id : report.queries) {
      const auto q = svc.workflow().query(id);
      std::cout << "query " << id << " (" << workflow::to_string(q.status);
      if (!q.close_reason.empty()) std::cout << ": " << q.close_reason;
      std::cout << ", " << q.accepted << " accepted)\n";
      std::cout << engine::format_table(engine::evaluate(svc.workflow().plan(id), svc.database().snapshot(), q.mode))
                << "\n";
    }
    print_sources(*svc.database().snapshot());
    for (const auto& v : report.violations) std::cerr << "staging violation: " << v << "\n";
    if (report.stalled) std::cerr << "simulation stopped at tick " << report.finished_at << " with work outstanding\n";
    return report.stalled || !report.violations.empty() ? 1 : 0;
  }

  if (*sources) {
    print_sources(open_db(database_dir(dir)).db);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cureql::DiagnosticError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << cureql::render(d) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
}
