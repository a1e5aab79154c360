#include "curelite/workflow/task.hpp"

namespace curelite::workflow {

namespace {

constexpr std::pair<TaskKind, std::string_view> kKinds[] = {
    {TaskKind::RowSolicit, "row_solicit"}, {TaskKind::CellFill, "cell_fill"}, {TaskKind::Review, "review"}};
constexpr std::pair<TaskState, std::string_view> kStates[] = {{TaskState::Open, "open"},
                                                              {TaskState::Submitted, "submitted"},
                                                              {TaskState::Expired, "expired"},
                                                              {TaskState::Cancelled, "cancelled"}};

}  // namespace

std::string_view to_string(TaskKind kind) {
  for (const auto& [k, s] : kKinds) {
    if (k == kind) return s;
  }
  return "?";
}

std::string_view to_string(TaskState state) {
  for (const auto& [k, s] : kStates) {
    if (k == state) return s;
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  for (const auto& [k, s] : kKinds) {
    if (s == text) return k;
  }
  return std::nullopt;
}

std::optional<TaskState> parse_task_state(std::string_view text) {
  for (const auto& [k, s] : kStates) {
    if (s == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(QueryStatus status) { return status == QueryStatus::Collecting ? "collecting" : "closed"; }

}  // namespace curelite::workflow
