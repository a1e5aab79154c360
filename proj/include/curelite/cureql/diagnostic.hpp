#pragma once

#include <string>
#include <vector>

#include "curelite/common/error.hpp"

namespace curelite::cureql {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  int line = 1;
  int column = 1;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// `severity code line:col message`
std::string render(const Diagnostic& d);
std::string render(const std::vector<Diagnostic>& ds);

bool has_errors(const std::vector<Diagnostic>& ds);

/// Frontend failure carrying its diagnostics.
class DiagnosticError : public Error {
 public:
  DiagnosticError(ErrorCode code, std::vector<Diagnostic> diagnostics)
      : Error(code, render(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace curelite::cureql
