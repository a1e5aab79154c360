#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "curelite/workflow/task.hpp"

namespace curelite::workflow {

/// Typed JSON for cell values: CNULL is null, numbers and strings are native,
/// dates are {"date": "YYYY-MM-DD"}.
nlohmann::json value_to_json(const eist::Value& v);
eist::Value value_from_json(const nlohmann::json& j);  // throws CorruptFile

nlohmann::json row_to_json(const eist::Row& row);
eist::Row row_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Task& task);
Task task_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QueryRecord& query);
QueryRecord query_from_json(const nlohmann::json& j);

/// One JSON object per line: a header with the id counters, then queries,
/// then tasks, each in id order. Keys are sorted, so equal states give equal
/// text.
std::string to_jsonl(const WorkflowState& state);
/// Throws CorruptFile naming the offending line.
WorkflowState from_jsonl(std::string_view text);

}  // namespace curelite::workflow
