#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fiper {

/// Base for every failure raised by the library. `code` is a stable,
/// machine-readable identifier; `path` locates the offending field or file
/// when one is known.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(std::move(code)), path_(std::move(path)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string code_;
  std::string path_;
};

/// A predicate or instance names a feature that the other side does not know,
/// or carries a value of the wrong kind.
class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& message, std::string path = {})
      : Error("schema-mismatch", message, std::move(path)) {}
};

/// Raised by the rule-text parser. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::string code, const std::string& message, std::size_t line, std::size_t column)
      : Error(std::move(code),
              message + " at " + std::to_string(line) + ":" + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Violation {
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Thrown when a document parses but fails validation; carries every violation.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport violations, std::string source = {})
      : Error("validation-failed", summarize(violations, source),
              violations.empty() ? source : violations.front().path),
        violations_(std::move(violations)) {}

  const ValidationReport& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const ValidationReport& violations, const std::string& source) {
    std::string out = source.empty() ? "validation failed" : source + ": validation failed";
    for (const auto& v : violations) out += "\n  " + v.path + ": [" + v.code + "] " + v.message;
    return out;
  }

  ValidationReport violations_;
};

}  // namespace fiper
