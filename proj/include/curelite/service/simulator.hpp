#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curelite/service/service.hpp"

namespace curelite::service {

/// One scripted step: wait `delay` ticks, then act on the first visible task
/// that matches, `repeat` times (-1 keeps acting forever).
struct BotAction {
  enum class Do { Approve, Amend, Submit, Skip };

  std::optional<std::string> kind;   // row_solicit, cell_fill, review
  std::optional<std::size_t> level;
  std::optional<std::size_t> query;  // 1-based position in the query list
  std::map<std::string, nlohmann::json> where;  // column -> value on the task's row
  Do action = Do::Approve;
  /// Submit: full row, or one value for a cell. Amend: full row, or an object
  /// of column -> value applied to the candidate.
  nlohmann::json values;
  workflow::Tick delay = 0;
  int repeat = 1;
};

struct BotScript {
  std::map<std::string, std::vector<BotAction>> curators;  // by display name
  workflow::Tick max_ticks = 1000;
};

/// Throws InvalidArgument naming the offending entry.
BotScript parse_bot_script(const nlohmann::json& j);

struct SimulationReport {
  std::vector<std::uint64_t> queries;
  workflow::Tick finished_at = 0;
  bool stalled = false;  // max_ticks reached with work outstanding
  std::vector<std::string> trace;
  /// A task above level 1 seen while its parent was still open.
  std::vector<std::string> violations;
};

/// Submits the queries, then alternates bot turns and clock ticks through the
/// service API until every collection closes or no bot has work left. The
/// service must run in simulation mode. Throws InvalidArgument for a rejected
/// query or an unknown curator.
SimulationReport simulate(Service& service, const BotScript& script, const std::vector<std::string>& queries);

/// Statements of a query file, each in canonical single-line form. Throws
/// DiagnosticError.
std::vector<std::string> split_queries(const std::string& text);

}  // namespace curelite::service
