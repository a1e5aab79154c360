#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curelite/eist/reliability.hpp"
#include "curelite/eist/source.hpp"
#include "curelite/eist/value.hpp"
#include "curelite/engine/plan.hpp"

namespace curelite::workflow {

using Tick = std::int64_t;

struct CuratorLevel {
  std::size_t index = 1;  // 1 is the lowest authority
  std::vector<eist::SourceId> members;  // ascending
  std::string origin;  // relation or view name, or "query"
  std::optional<eist::Row> group_key;

  friend bool operator==(const CuratorLevel&, const CuratorLevel&) = default;
};

enum class TaskKind { RowSolicit, CellFill, Review };
enum class TaskState { Open, Submitted, Expired, Cancelled };

std::string_view to_string(TaskKind kind);
std::string_view to_string(TaskState state);
std::optional<TaskKind> parse_task_kind(std::string_view text);
std::optional<TaskState> parse_task_state(std::string_view text);

/// A row under review together with the sources that asserted it so far.
struct Candidate {
  eist::Row values;
  std::vector<eist::SourceId> contributors;  // ascending, no T

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Task {
  std::uint64_t id = 0;
  std::uint64_t query_id = 0;
  TaskKind kind = TaskKind::Review;
  std::string relation;
  /// CellFill and cell reviews: the stored row holding the CNULL, and the column.
  std::optional<eist::Row> original;
  std::optional<std::size_t> column;
  std::optional<Candidate> candidate;  // Review
  std::size_t level = 1;
  std::size_t levels = 1;  // height of the hierarchy this task climbs
  std::vector<eist::SourceId> assigned;
  TaskState state = TaskState::Open;
  std::optional<Tick> deadline;
  Tick created_at = 0;
  std::optional<std::uint64_t> parent;  // lower-level task this one follows
  std::optional<eist::SourceId> submitted_by;

  bool is_open() const { return state == TaskState::Open; }
  friend bool operator==(const Task&, const Task&) = default;
};

enum class QueryStatus { Collecting, Closed };

std::string_view to_string(QueryStatus status);

struct QueryRecord {
  std::uint64_t id = 0;
  std::string text;
  std::map<std::string, std::int64_t> params;  // LIMIT placeholders
  eist::ReliabilityMode mode = eist::ReliabilityMode::Probabilistic;
  engine::Limits limits;
  Tick started_at = 0;
  QueryStatus status = QueryStatus::Closed;
  std::string close_reason;
  std::size_t accepted = 0;  // rows finalized into Predict
  bool has_collection = false;

  /// Results may be read: the collection closed, or it never ends.
  bool ready() const { return status == QueryStatus::Closed || limits.indefinite(); }
  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

/// What a curator sends back for a task.
struct Submission {
  enum class Action { Values, Approve, Amend };

  Action action = Action::Values;
  /// Values: the full row for a solicitation, one value for a cell fill.
  /// Amend: the full corrected row, or one value for a cell review.
  eist::Row values;
};

struct SubmitResult {
  Task task;
  std::vector<std::uint64_t> created;  // follow-up tasks
  std::vector<eist::Row> finalized;    // rows written to Predict
  bool query_closed = false;
};

struct StateChange {
  std::uint64_t task = 0;
  TaskState from = TaskState::Open;
  TaskState to = TaskState::Open;

  friend bool operator==(const StateChange&, const StateChange&) = default;
};

/// Everything the workflow needs to resume after a restart.
struct WorkflowState {
  std::uint64_t next_query = 1;
  std::uint64_t next_task = 1;
  std::vector<QueryRecord> queries;  // ascending id
  std::vector<Task> tasks;           // ascending id

  friend bool operator==(const WorkflowState&, const WorkflowState&) = default;
};

}  // namespace curelite::workflow
