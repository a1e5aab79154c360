#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "curelite/engine/database.hpp"
#include "curelite/engine/plan.hpp"
#include "curelite/workflow/task.hpp"

namespace curelite::workflow {

/// Collection-phase state for every query: tasks, staging across curator
/// levels, deadlines on a caller-supplied clock and row budgets. All
/// transitions are serialized; finalized rows go to the database's Predict.
class Workflow {
 public:
  explicit Workflow(engine::Database& db);

  /// Registers a query. Pure queries are recorded closed with no tasks.
  /// Otherwise runs the extractor and opens level-1 tasks. Throws
  /// ExtractorFailure, AdapterNotFound, CrowdColumnsUncovered,
  /// MalformedCandidate, EmptyLevel or InvalidArgument.
  std::uint64_t start(const std::string& text, const engine::Plan& plan,
                      const std::map<std::string, std::int64_t>& params, eist::ReliabilityMode mode, Tick now);

  /// Open, unexpired tasks assigned to `curator`, by id. Throws UnknownCurator.
  std::vector<Task> visible_tasks(eist::SourceId curator, Tick now) const;

  /// Throws UnknownTask, RowBudgetExhausted, TaskClosed, NotAssigned or
  /// SchemaMismatch.
  SubmitResult submit(std::uint64_t task_id, eist::SourceId curator, const Submission& submission, Tick now);

  /// Expires overdue tasks (forwarding their candidates) and closes queries
  /// whose time limit passed or whose tasks are all terminal. Idempotent for
  /// a fixed `now`.
  std::vector<StateChange> tick(Tick now);

  QueryRecord query(std::uint64_t id) const;  // throws UnknownQuery
  engine::Plan plan(std::uint64_t id) const;
  std::optional<Task> task(std::uint64_t id) const;
  std::vector<Task> tasks_of(std::uint64_t query_id) const;

  WorkflowState state() const;
  /// Replaces the state and re-plans every query against the database.
  void restore(WorkflowState state);

 private:
  QueryRecord& record(std::uint64_t id);
  const engine::Plan& plan_for(std::uint64_t id) const;
  std::vector<eist::SourceId> members(const QueryRecord& q, std::size_t level, const eist::Row* row);
  std::size_t level_count(const QueryRecord& q) const;
  std::optional<Tick> deadline(const QueryRecord& q, std::size_t level) const;
  Task& add_task(Task task);
  void forward(QueryRecord& q, const Task& from, Candidate candidate, SubmitResult* result);
  void finalize(QueryRecord& q, const Task& from, const Candidate& candidate, SubmitResult* result);
  void close(QueryRecord& q, const std::string& reason, std::vector<StateChange>* changes);
  void maybe_close(QueryRecord& q, std::vector<StateChange>* changes);

  engine::Database& db_;
  mutable std::mutex mutex_;
  WorkflowState state_;
  std::map<std::uint64_t, engine::Plan> plans_;
};

}  // namespace curelite::workflow
