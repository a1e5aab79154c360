#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curelite {

enum class ErrorCode {
  // eist-core
  EmptyContributors,
  MixedFactContributors,
  UnknownSource,
  TooManyDistinctSources,
  TooManySources,
  SchemaMismatch,
  FactContributor,
  ConflictingFact,
  MalformedVector,
  NonBaseLineage,
  InvalidReliability,
  // cureql-frontend
  UnterminatedString,
  IllegalCharacter,
  SyntaxError,
  ValidationFailed,
  // query-engine
  ExtractorMissing,
  CrowdColumnsUncovered,
  UnknownOverrideSource,
  SnapshotGone,
  UnknownRelation,
  // crowd-workflow
  EmptyLevel,
  ExtractorFailure,
  AdapterNotFound,
  MalformedCandidate,
  UnknownCurator,
  UnknownTask,
  NotAssigned,
  TaskClosed,
  RowBudgetExhausted,
  // storage
  IoFailure,
  CorruptFile,
  VersionMismatch,
  InvariantViolation,
  Locked,
  // service
  UnknownQuery,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every module reports failures through this exception; `code()` is the
/// stable identifier surfaced by the CLI and the HTTP layer.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace curelite
