#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mospline {

enum class Severity { Warning, Error };

/// One structured finding from a validate_* call.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // machine-readable, e.g. "node-gap"
  std::string path;     // JSON-pointer-ish location, e.g. "nodes/3"
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
std::string to_string(Severity s);

/// Base for every error this library throws. `code()` is stable and is what
/// the CLI and service report to clients.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
  InvalidArgument(std::string code, const std::string& what) : Error(std::move(code), what) {}
};

class OutOfDomain : public Error {
 public:
  explicit OutOfDomain(const std::string& what) : Error("out-of-domain", what) {}
};

class UndefinedPoint : public Error {
 public:
  explicit UndefinedPoint(const std::string& what) : Error("undefined-point", what) {}
};

class DegenerateNormal : public Error {
 public:
  explicit DegenerateNormal(const std::string& what) : Error("degenerate-normal", what) {}
};

/// Thrown when constructing a model from a description that fails validation.
class ValidationError : public Error {
 public:
  explicit ValidationError(Diagnostics diags);
  const Diagnostics& diagnostics() const noexcept { return diags_; }

 private:
  Diagnostics diags_;
};

/// Malformed input document; `path` names the offending location.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what, Diagnostics diags = {})
      : Error("parse-error", what), path_(std::move(path)), diags_(std::move(diags)) {}
  const std::string& path() const noexcept { return path_; }
  const Diagnostics& diagnostics() const noexcept { return diags_; }

 private:
  std::string path_;
  Diagnostics diags_;
};

}  // namespace mospline
