#include "curelite/cureql/diagnostic.hpp"

#include <algorithm>

namespace curelite::cureql {

std::string render(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + " " + d.code + " " +
         std::to_string(d.line) + ":" + std::to_string(d.column) + " " + d.message;
}

std::string render(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += '\n';
    out += render(d);
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace curelite::cureql
