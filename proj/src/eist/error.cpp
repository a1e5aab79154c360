#include "curelite/common/error.hpp"

namespace curelite {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyContributors: return "EmptyContributors";
    case ErrorCode::MixedFactContributors: return "MixedFactContributors";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::TooManyDistinctSources: return "TooManyDistinctSources";
    case ErrorCode::TooManySources: return "TooManySources";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::FactContributor: return "FactContributor";
    case ErrorCode::ConflictingFact: return "ConflictingFact";
    case ErrorCode::MalformedVector: return "MalformedVector";
    case ErrorCode::NonBaseLineage: return "NonBaseLineage";
    case ErrorCode::InvalidReliability: return "InvalidReliability";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::ExtractorMissing: return "ExtractorMissing";
    case ErrorCode::CrowdColumnsUncovered: return "CrowdColumnsUncovered";
    case ErrorCode::UnknownOverrideSource: return "UnknownOverrideSource";
    case ErrorCode::SnapshotGone: return "SnapshotGone";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::ExtractorFailure: return "ExtractorFailure";
    case ErrorCode::AdapterNotFound: return "AdapterNotFound";
    case ErrorCode::MalformedCandidate: return "MalformedCandidate";
    case ErrorCode::UnknownCurator: return "UnknownCurator";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::NotAssigned: return "NotAssigned";
    case ErrorCode::TaskClosed: return "TaskClosed";
    case ErrorCode::RowBudgetExhausted: return "RowBudgetExhausted";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::Locked: return "Locked";
    case ErrorCode::UnknownQuery: return "UnknownQuery";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace curelite
