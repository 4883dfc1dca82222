#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tagdl {

struct SourceLocation {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;

  std::string to_string() const {
    return (file.empty() ? "<input>" : file) + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
};

/// Rejected program text: syntax, typing, binding or stratification.
class CompileError : public std::runtime_error {
 public:
  CompileError(SourceLocation loc, const std::string& message)
      : std::runtime_error(loc.to_string() + ": error: " + message), loc_(std::move(loc)), message_(message) {}

  const SourceLocation& location() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  SourceLocation loc_;
  std::string message_;
};

/// Evaluation aborted: iteration limit or world cap exceeded.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input such as a CSV file.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tagdl
