#pragma once

#include <filesystem>

#include "curelite/engine/script.hpp"

namespace curelite::engine {

/// Loads a fixture directory into `db`:
///   sources.tsv     name, kind (curator|extractor), initial reliability
///   extractors.tsv  name, kind (file|program), location, requires_input (yes|no)
///   *.cql           CREATE/INSERT scripts, applied in file-name order
/// Lines starting with '#' are comments. Relative extractor locations are
/// resolved against the fixture directory. Throws IoFailure, CorruptFile or
/// DiagnosticError.
ScriptResult load_fixtures(Database& db, const std::filesystem::path& dir);

}  // namespace curelite::engine
