#include "mospline/error.hpp"

#include <algorithm>

namespace mospline {

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

namespace {

std::string summarize(const Diagnostics& diags) {
  std::string msg = "validation failed";
  for (const auto& d : diags) {
    if (d.severity != Severity::Error) continue;
    msg += ": " + d.path + ": " + d.message;
    break;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(Diagnostics diags)
    : Error("validation-failed", summarize(diags)), diags_(std::move(diags)) {}

}  // namespace mospline
