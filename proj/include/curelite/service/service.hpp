#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "curelite/engine/database.hpp"
#include "curelite/engine/evaluate.hpp"
#include "curelite/storage/storage.hpp"
#include "curelite/workflow/workflow.hpp"

namespace curelite::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct Options {
  /// Logical clock advanced only by POST /admin/tick.
  bool simulation = false;
  /// Wall clock in LIMIT TIME units; defaults to seconds since the epoch.
  std::function<workflow::Tick()> clock;
};

/// HTTP-independent request handling. Every successful mutation is reported
/// to the journal sink as one JSON line; replay() applies such a line.
class Service {
 public:
  explicit Service(storage::Stored initial, Options options = {});

  Response handle(std::string_view method, std::string_view path, const std::string& body);

  void set_journal(std::function<void(const std::string&)> sink);
  /// Throws CorruptFile for an unreadable line, or the mutation's own error.
  void replay(const std::string& line);

  workflow::Tick now() const;
  engine::Database& database() { return *db_; }
  workflow::Workflow& workflow() { return *workflow_; }
  storage::Stored state() const;

 private:
  Response route(std::string_view method, const std::vector<std::string>& parts, const nlohmann::json& body);
  Response post_query(const nlohmann::json& body);
  Response post_submission(std::uint64_t task, const nlohmann::json& body);
  Response put_reliability(const std::string& source, const nlohmann::json& body);
  Response post_whatif(const nlohmann::json& body);
  Response post_tick(const nlohmann::json& body);
  nlohmann::json query_view(std::uint64_t id) const;
  nlohmann::json task_view(const workflow::Task& task) const;
  void advance_wall_clock();
  void apply(const nlohmann::json& entry);
  void journal(const nlohmann::json& entry);

  std::unique_ptr<engine::Database> db_;
  std::unique_ptr<workflow::Workflow> workflow_;
  Options options_;
  workflow::Tick logical_now_ = 0;
  std::function<void(const std::string&)> sink_;
  mutable std::recursive_mutex mutex_;
};

nlohmann::json to_json(const engine::ResultSet& result);

/// Curator by ordinal or display name; nullopt when unknown.
std::optional<eist::SourceId> resolve_source(const eist::SourceRegistry& sources, const std::string& text);

/// JSON cells coerced to the column types: ISO strings become dates.
eist::Row row_for(const nlohmann::json& values, const std::vector<eist::BaseType>& types);

/// Serves the API over HTTP until stop() or a signal. Blocks.
void serve(Service& service, const std::string& host, int port);

}  // namespace curelite::service
