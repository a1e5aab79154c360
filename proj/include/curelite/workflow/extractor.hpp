#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curelite/cureql/catalog.hpp"
#include "curelite/eist/schema.hpp"

namespace curelite::workflow {

/// Candidate rows from an extraction tool, typed against the target relation.
///
/// File adapters read `<location>/<input>.tsv`; program adapters run
/// `<location> [input]` and read its standard output. Either way the text is
/// tab-separated with a header naming target columns in any order; every
/// column must be present and populated. A missing or empty crowd column is
/// CrowdColumnsUncovered. Also throws AdapterNotFound, ExtractorFailure or
/// MalformedCandidate.
std::vector<eist::Row> run_extractor(const cureql::ExtractorDecl& tool, const std::optional<std::string>& input,
                                     const eist::Schema& target);

/// The parsing half of run_extractor; `origin` prefixes error messages.
std::vector<eist::Row> parse_candidates(std::string_view text, const eist::Schema& target, const std::string& origin);

}  // namespace curelite::workflow
