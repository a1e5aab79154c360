#include "curelite/workflow/workflow.hpp"

#include <algorithm>

#include "curelite/common/error.hpp"
#include "curelite/engine/script.hpp"
#include "curelite/workflow/extractor.hpp"
#include "curelite/workflow/levels.hpp"

namespace curelite::workflow {

namespace {

const char* const kBudgetReason = "row budget";

std::vector<eist::SourceId> with(std::vector<eist::SourceId> ids, eist::SourceId extra) {
  if (std::find(ids.begin(), ids.end(), extra) == ids.end()) ids.push_back(extra);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

Workflow::Workflow(engine::Database& db) : db_(db) {}

QueryRecord& Workflow::record(std::uint64_t id) {
  for (auto& q : state_.queries) {
    if (q.id == id) return q;
  }
  throw Error(ErrorCode::UnknownQuery, "no query " + std::to_string(id));
}

const engine::Plan& Workflow::plan_for(std::uint64_t id) const {
  auto it = plans_.find(id);
  if (it == plans_.end()) throw Error(ErrorCode::UnknownQuery, "no query " + std::to_string(id));
  return it->second;
}

std::size_t Workflow::level_count(const QueryRecord& q) const {
  const auto& c = plan_for(q.id).collection;
  return c && c->levels ? c->levels->levels.size() : 1;
}

std::optional<Tick> Workflow::deadline(const QueryRecord& q, std::size_t level) const {
  if (!q.limits.time) return std::nullopt;
  // The time limit bounds the whole collection and is split evenly over levels.
  return q.started_at + *q.limits.time * static_cast<Tick>(level) / static_cast<Tick>(level_count(q));
}

std::vector<eist::SourceId> Workflow::members(const QueryRecord& q, std::size_t level, const eist::Row* row) {
  const auto& p = plan_for(q.id);
  const auto& c = *p.collection;
  if (!c.levels) {
    // No SOURCE clause: the open crowd of registered curators.
    std::vector<eist::SourceId> out;
    for (const auto& profile : db_.snapshot()->sources.profiles()) {
      if (profile.kind == eist::SourceKind::Curator) out.push_back(profile.source);
    }
    if (out.empty()) throw Error(ErrorCode::EmptyLevel, "no curators are registered");
    return out;
  }
  const auto& spec = c.levels->levels.at(level - 1);
  std::map<std::size_t, eist::Row> outer;
  std::optional<eist::Row> group_key;
  if (row && c.per_group) {
    group_key.emplace();
    for (const auto& col : c.group_by) group_key->push_back((*row)[col.attribute]);
  }
  if (spec.correlated) {
    if (!row) throw Error(ErrorCode::InvalidArgument, "a correlated curator level needs a candidate row");
    outer.emplace(c.target_binding, *row);
  }
  return resolve_level(spec, level, db_, outer, group_key).members;
}

Task& Workflow::add_task(Task task) {
  task.id = state_.next_task++;
  state_.tasks.push_back(std::move(task));
  return state_.tasks.back();
}

std::uint64_t Workflow::start(const std::string& text, const engine::Plan& plan,
                              const std::map<std::string, std::int64_t>& params, eist::ReliabilityMode mode, Tick now) {
  std::lock_guard lock(mutex_);
  QueryRecord q;
  q.text = text;
  q.params = params;
  q.mode = mode;
  q.limits = engine::bind_limits(plan.query.limit, params);
  q.started_at = now;

  if (!plan.collection) {
    q.id = state_.next_query++;
    q.status = QueryStatus::Closed;
    q.close_reason = "no collection";
    plans_[q.id] = plan;
    state_.queries.push_back(q);
    return q.id;
  }

  const auto& c = *plan.collection;
  const auto snap = db_.snapshot();
  std::vector<Candidate> extracted;
  if (c.extractor) {
    const auto tool = snap->sources.find_by_name(c.extractor->name);
    if (!tool) throw Error(ErrorCode::UnknownSource, "extractor '" + c.extractor->name + "' is not a registered source");
    for (auto& row : run_extractor(*c.extractor, c.input, snap->relation(c.target_relation).schema())) {
      extracted.push_back(Candidate{std::move(row), {*tool}});
    }
  }
  if (c.levels) {
    for (std::size_t i = 0; i < c.levels->levels.size(); ++i) {
      const auto& level = c.levels->levels[i];
      if (level.correlated) {
        if (c.solicit_rows && i == 0) {
          throw Error(ErrorCode::InvalidArgument, "row solicitations cannot go to a correlated first level");
        }
        continue;
      }
      resolve_level(level, i + 1, db_);  // EmptyLevel surfaces before any task exists
    }
  }

  q.id = state_.next_query++;
  q.status = QueryStatus::Collecting;
  q.has_collection = true;
  plans_[q.id] = plan;
  state_.queries.push_back(q);
  const std::size_t height = level_count(q);

  auto base = [&](TaskKind kind, const std::string& relation) {
    Task t;
    t.query_id = q.id;
    t.kind = kind;
    t.relation = relation;
    t.levels = height;
    t.deadline = deadline(q, 1);
    t.created_at = now;
    return t;
  };
  try {
    for (auto& cand : extracted) {
      Task t = base(TaskKind::Review, c.target_relation);
      t.assigned = members(q, 1, &cand.values);
      t.candidate = std::move(cand);
      add_task(std::move(t));
    }
    if (c.solicit_rows) {
      const auto slots = q.limits.rows.value_or(1);
      for (std::int64_t i = 0; i < slots; ++i) {
        Task t = base(TaskKind::RowSolicit, c.target_relation);
        t.assigned = members(q, 1, nullptr);
        add_task(std::move(t));
      }
    }
    for (const auto& fill : c.cell_fills) {
      Task t = base(TaskKind::CellFill, fill.relation);
      t.original = fill.row;
      t.column = fill.column;
      t.assigned = members(q, 1, fill.relation == c.target_relation ? &fill.row : nullptr);
      add_task(std::move(t));
    }
  } catch (...) {
    std::erase_if(state_.tasks, [&](const Task& t) { return t.query_id == q.id; });
    std::erase_if(state_.queries, [&](const QueryRecord& r) { return r.id == q.id; });
    plans_.erase(q.id);
    throw;
  }
  maybe_close(record(q.id), nullptr);
  return q.id;
}

std::vector<Task> Workflow::visible_tasks(eist::SourceId curator, Tick now) const {
  std::lock_guard lock(mutex_);
  if (curator.is_truth() || !db_.snapshot()->sources.contains(curator)) {
    throw Error(ErrorCode::UnknownCurator, "curator " + std::to_string(curator.value()) + " is not registered");
  }
  std::vector<Task> out;
  for (const auto& t : state_.tasks) {
    if (!t.is_open() || (t.deadline && now >= *t.deadline)) continue;
    if (std::binary_search(t.assigned.begin(), t.assigned.end(), curator)) out.push_back(t);
  }
  return out;
}

void Workflow::finalize(QueryRecord& q, const Task& from, const Candidate& candidate, SubmitResult* result) {
  if (q.status == QueryStatus::Closed) return;
  if (from.column) {
    db_.fill_cell(from.relation, *from.original, *from.column, candidate.values[*from.column], candidate.contributors);
  } else {
    db_.insert_predict(from.relation, candidate.values, candidate.contributors);
  }
  ++q.accepted;
  if (result) result->finalized.push_back(candidate.values);
  if (q.limits.rows && static_cast<std::int64_t>(q.accepted) >= *q.limits.rows) {
    close(q, kBudgetReason, nullptr);
    if (result) result->query_closed = true;
  }
}

void Workflow::forward(QueryRecord& q, const Task& from, Candidate candidate, SubmitResult* result) {
  if (q.status == QueryStatus::Closed) return;
  if (from.level >= from.levels) {
    finalize(q, from, candidate, result);
    return;
  }
  Task next;
  next.query_id = q.id;
  next.kind = TaskKind::Review;
  next.relation = from.relation;
  next.original = from.original;
  next.column = from.column;
  next.level = from.level + 1;
  next.levels = from.levels;
  next.deadline = deadline(q, next.level);
  next.created_at = from.created_at;
  next.parent = from.id;
  const eist::Row* row = from.original && from.relation != plan_for(q.id).collection->target_relation
                             ? nullptr
                             : &candidate.values;
  next.assigned = members(q, next.level, row);
  next.candidate = std::move(candidate);
  const auto id = add_task(std::move(next)).id;
  if (result) result->created.push_back(id);
}

void Workflow::close(QueryRecord& q, const std::string& reason, std::vector<StateChange>* changes) {
  if (q.status == QueryStatus::Closed) return;
  q.status = QueryStatus::Closed;
  q.close_reason = reason;
  for (auto& t : state_.tasks) {
    if (t.query_id != q.id || !t.is_open()) continue;
    t.state = TaskState::Cancelled;
    if (changes) changes->push_back({t.id, TaskState::Open, TaskState::Cancelled});
  }
}

void Workflow::maybe_close(QueryRecord& q, std::vector<StateChange>* changes) {
  if (q.status == QueryStatus::Closed || q.limits.indefinite()) return;
  const bool pending = std::any_of(state_.tasks.begin(), state_.tasks.end(),
                                   [&](const Task& t) { return t.query_id == q.id && t.is_open(); });
  if (!pending) close(q, "all tasks terminal", changes);
}

SubmitResult Workflow::submit(std::uint64_t task_id, eist::SourceId curator, const Submission& submission, Tick now) {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(state_.tasks.begin(), state_.tasks.end(), [&](const Task& t) { return t.id == task_id; });
  if (it == state_.tasks.end()) throw Error(ErrorCode::UnknownTask, "no task " + std::to_string(task_id));
  const std::size_t index = static_cast<std::size_t>(it - state_.tasks.begin());
  QueryRecord& q = record(it->query_id);

  if (q.status == QueryStatus::Closed && q.close_reason == kBudgetReason) {
    throw Error(ErrorCode::RowBudgetExhausted, "query " + std::to_string(q.id) + " accepted its " +
                                                   std::to_string(q.accepted) + " rows");
  }
  if (!it->is_open() || (it->deadline && now >= *it->deadline)) {
    throw Error(ErrorCode::TaskClosed, "task " + std::to_string(task_id) + " is " + std::string(to_string(it->state)));
  }
  if (!std::binary_search(it->assigned.begin(), it->assigned.end(), curator)) {
    throw Error(ErrorCode::NotAssigned, "task " + std::to_string(task_id) + " is not assigned to this curator");
  }

  const auto& schema = db_.snapshot()->relation(it->relation).schema();
  auto cell_value = [&](const eist::Row& values) {
    if (values.size() != 1 || eist::is_cnull(values[0])) {
      throw Error(ErrorCode::SchemaMismatch, "a cell needs exactly one non-CNULL value");
    }
    eist::Row filled = *it->original;
    filled[*it->column] = values[0];
    schema.check_row(filled, true);
    return filled;
  };
  auto full_row = [&](const eist::Row& values) {
    schema.check_row(values, true);
    return values;
  };

  std::vector<Candidate> outcome;
  switch (it->kind) {
    case TaskKind::RowSolicit:
      if (submission.action != Submission::Action::Values) throw Error(ErrorCode::SchemaMismatch, "expected a row");
      outcome.push_back({full_row(submission.values), {curator}});
      break;
    case TaskKind::CellFill:
      if (submission.action != Submission::Action::Values) throw Error(ErrorCode::SchemaMismatch, "expected a value");
      outcome.push_back({cell_value(submission.values), {curator}});
      break;
    case TaskKind::Review: {
      const Candidate& current = *it->candidate;
      if (submission.action == Submission::Action::Approve) {
        outcome.push_back({current.values, with(current.contributors, curator)});
        break;
      }
      eist::Row amended = it->column ? cell_value(submission.values) : full_row(submission.values);
      if (amended == current.values) {
        outcome.push_back({current.values, with(current.contributors, curator)});
      } else {
        outcome.push_back({std::move(amended), {curator}});
        // A replaced cell has nowhere to live; a full row stays as a rival.
        if (!it->column) outcome.push_back(current);
      }
      break;
    }
  }

  it->state = TaskState::Submitted;
  it->submitted_by = curator;
  const Task done = *it;
  SubmitResult result;
  for (auto& cand : outcome) forward(q, done, std::move(cand), &result);
  if (done.kind == TaskKind::RowSolicit && !q.limits.rows && q.status == QueryStatus::Collecting) {
    // Without a row budget solicitation continues.
    Task slot = done;
    slot.state = TaskState::Open;
    slot.submitted_by.reset();
    slot.parent.reset();
    slot.created_at = now;
    result.created.push_back(add_task(std::move(slot)).id);
  }
  maybe_close(q, nullptr);
  result.query_closed = q.status == QueryStatus::Closed;
  result.task = state_.tasks[index];
  return result;
}

std::vector<StateChange> Workflow::tick(Tick now) {
  std::lock_guard lock(mutex_);
  std::vector<StateChange> changes;
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; i < state_.tasks.size(); ++i) {
      if (!state_.tasks[i].is_open() || !state_.tasks[i].deadline || now < *state_.tasks[i].deadline) continue;
      state_.tasks[i].state = TaskState::Expired;
      changes.push_back({state_.tasks[i].id, TaskState::Open, TaskState::Expired});
      const Task expired = state_.tasks[i];
      // An unreviewed candidate moves on unchanged.
      if (expired.kind == TaskKind::Review) forward(record(expired.query_id), expired, *expired.candidate, nullptr);
      again = true;
    }
  }
  for (auto& q : state_.queries) {
    if (q.status != QueryStatus::Collecting) continue;
    if (q.limits.time && now >= q.started_at + *q.limits.time) {
      close(q, "time limit", &changes);
    } else {
      maybe_close(q, &changes);
    }
  }
  return changes;
}

QueryRecord Workflow::query(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  for (const auto& q : state_.queries) {
    if (q.id == id) return q;
  }
  throw Error(ErrorCode::UnknownQuery, "no query " + std::to_string(id));
}

engine::Plan Workflow::plan(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  return plan_for(id);
}

std::optional<Task> Workflow::task(std::uint64_t id) const {
  std::lock_guard lock(mutex_);
  for (const auto& t : state_.tasks) {
    if (t.id == id) return t;
  }
  return std::nullopt;
}

std::vector<Task> Workflow::tasks_of(std::uint64_t query_id) const {
  std::lock_guard lock(mutex_);
  std::vector<Task> out;
  for (const auto& t : state_.tasks) {
    if (t.query_id == query_id) out.push_back(t);
  }
  return out;
}

WorkflowState Workflow::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Workflow::restore(WorkflowState state) {
  std::map<std::uint64_t, engine::Plan> plans;
  const auto snap = db_.snapshot();
  for (const auto& q : state.queries) {
    plans[q.id] = engine::plan(engine::compile_select(q.text, snap->catalog), *snap);
    auto& p = plans[q.id];
    if (!q.has_collection) {
      p.collection.reset();
    } else if (!p.collection) {
      p.collection.emplace();  // its cells were filled since
    }
  }
  std::lock_guard lock(mutex_);
  state_ = std::move(state);
  plans_ = std::move(plans);
}

}  // namespace curelite::workflow
