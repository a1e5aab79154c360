#include "curelite/engine/fixtures.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "curelite/common/error.hpp"

namespace curelite::engine {

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-comment, non-blank lines split on tabs, with their line numbers.
std::vector<std::pair<int, std::vector<std::string>>> tsv_rows(const fs::path& path) {
  std::vector<std::pair<int, std::vector<std::string>>> out;
  std::istringstream in(slurp(path));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    out.emplace_back(n, std::move(fields));
  }
  return out;
}

[[noreturn]] void corrupt(const fs::path& path, int line, const std::string& why) {
  throw Error(ErrorCode::CorruptFile, path.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

ScriptResult load_fixtures(Database& db, const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, dir.string() + " is not a directory");

  if (const auto path = dir / "sources.tsv"; fs::exists(path)) {
    for (const auto& [line, f] : tsv_rows(path)) {
      if (f.size() < 2 || f.size() > 3) corrupt(path, line, "expected name, kind[, reliability]");
      eist::SourceKind kind;
      if (f[1] == "curator") {
        kind = eist::SourceKind::Curator;
      } else if (f[1] == "extractor") {
        kind = eist::SourceKind::Extractor;
      } else {
        corrupt(path, line, "unknown source kind '" + f[1] + "'");
      }
      std::optional<double> r;
      if (f.size() == 3) {
        double v = 0;
        auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), v);
        if (ec != std::errc() || p != f[2].data() + f[2].size()) corrupt(path, line, "bad reliability '" + f[2] + "'");
        r = v;
      }
      db.register_source({f[0]}, kind, r);
    }
  }

  if (const auto path = dir / "extractors.tsv"; fs::exists(path)) {
    for (const auto& [line, f] : tsv_rows(path)) {
      if (f.size() != 4) corrupt(path, line, "expected name, kind, location, requires_input");
      cureql::ExtractorDecl decl;
      decl.name = f[0];
      if (f[1] == "file") {
        decl.kind = cureql::ExtractorDecl::Kind::File;
      } else if (f[1] == "program") {
        decl.kind = cureql::ExtractorDecl::Kind::Program;
      } else {
        corrupt(path, line, "unknown extractor kind '" + f[1] + "'");
      }
      fs::path location(f[2]);
      decl.location = (location.is_absolute() ? location : fs::absolute(dir / location)).lexically_normal().string();
      if (f[3] != "yes" && f[3] != "no") corrupt(path, line, "requires_input must be yes or no");
      decl.requires_input = f[3] == "yes";
      db.register_extractor(std::move(decl));
    }
  }

  std::vector<fs::path> scripts;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cql") scripts.push_back(entry.path());
  }
  std::sort(scripts.begin(), scripts.end());
  ScriptResult total;
  for (const auto& s : scripts) {
    auto r = run_script(db, slurp(s));
    total.statements += r.statements;
    total.warnings.insert(total.warnings.end(), r.warnings.begin(), r.warnings.end());
    total.write_warnings.insert(total.write_warnings.end(), r.write_warnings.begin(), r.write_warnings.end());
  }
  return total;
}

}  // namespace curelite::engine
