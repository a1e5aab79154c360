#include "curelite/workflow/extractor.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curelite/common/error.hpp"

namespace curelite::workflow {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string read_file_adapter(const cureql::ExtractorDecl& tool, const std::optional<std::string>& input) {
  fs::path path = tool.location;
  if (fs::is_directory(path)) {
    if (!input) throw Error(ErrorCode::ExtractorFailure, tool.name + " needs an ON input naming a file in " + path.string());
    path /= *input + ".tsv";
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::AdapterNotFound, tool.name + ": no candidate file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run_program_adapter(const cureql::ExtractorDecl& tool, const std::optional<std::string>& input) {
  if (!fs::exists(tool.location)) throw Error(ErrorCode::AdapterNotFound, tool.name + ": no program " + tool.location);
  std::string cmd = shell_quote(tool.location);
  if (input) cmd += " " + shell_quote(*input);
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw Error(ErrorCode::ExtractorFailure, tool.name + ": cannot start " + tool.location);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::ExtractorFailure, tool.name + " exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  return out;
}

}  // namespace

std::vector<eist::Row> parse_candidates(std::string_view text, const eist::Schema& target, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  std::vector<std::optional<std::size_t>> columns;  // header position -> target attribute
  bool have_header = false;
  std::vector<eist::Row> rows;
  const auto& attrs = target.attributes();

  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (!have_header) {
      have_header = true;
      std::vector<bool> seen(attrs.size(), false);
      for (const auto& name : fields) {
        auto idx = target.index_of(name);
        if (!idx) throw Error(ErrorCode::MalformedCandidate, origin + ":" + std::to_string(n) + ": unknown column '" + name + "'");
        if (seen[*idx]) throw Error(ErrorCode::MalformedCandidate, origin + ":" + std::to_string(n) + ": repeated column '" + name + "'");
        seen[*idx] = true;
        columns.push_back(idx);
      }
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (seen[i]) continue;
        if (target.is_crowd_column(i)) {
          throw Error(ErrorCode::CrowdColumnsUncovered, origin + ": crowd column '" + attrs[i].name + "' is missing");
        }
        throw Error(ErrorCode::MalformedCandidate, origin + ": column '" + attrs[i].name + "' is missing");
      }
      continue;
    }
    if (fields.size() != columns.size()) {
      throw Error(ErrorCode::MalformedCandidate, origin + ":" + std::to_string(n) + ": expected " +
                                                     std::to_string(columns.size()) + " fields");
    }
    eist::Row row(attrs.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::size_t a = *columns[f];
      if (fields[f].empty()) {
        throw Error(ErrorCode::CrowdColumnsUncovered,
                    origin + ":" + std::to_string(n) + ": no value for '" + attrs[a].name + "'");
      }
      auto v = eist::parse_value(fields[f], attrs[a].type);
      if (!v) {
        throw Error(ErrorCode::MalformedCandidate, origin + ":" + std::to_string(n) + ": bad value for '" + attrs[a].name + "'");
      }
      row[a] = std::move(*v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorCode::MalformedCandidate, origin + ": missing header");
  return rows;
}

std::vector<eist::Row> run_extractor(const cureql::ExtractorDecl& tool, const std::optional<std::string>& input,
                                     const eist::Schema& target) {
  if (tool.requires_input && !input) {
    throw Error(ErrorCode::ExtractorFailure, tool.name + " requires an ON input");
  }
  const std::string text = tool.kind == cureql::ExtractorDecl::Kind::File ? read_file_adapter(tool, input)
                                                                          : run_program_adapter(tool, input);
  return parse_candidates(text, target, tool.name);
}

}  // namespace curelite::workflow
