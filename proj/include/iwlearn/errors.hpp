#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iwlearn {

// Malformed input data. Carries 1-based line/column when known.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::uint64_t line = 0, std::uint64_t column = 0)
      : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}

  std::uint64_t line() const { return line_; }
  std::uint64_t column() const { return column_; }

 private:
  static std::string format(const std::string& msg, std::uint64_t line, std::uint64_t column) {
    std::string s = msg;
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    if (column > 0) s += " (column " + std::to_string(column) + ")";
    return s;
  }
  std::uint64_t line_;
  std::uint64_t column_;
};

// Non-finite values or a solver that failed to converge. For training this
// normally means the standard rule diverged; the index of the offending
// example is attached when known.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg, std::uint64_t example_index = 0)
      : std::runtime_error(example_index > 0 ? msg + " (example " + std::to_string(example_index) + ")" : msg),
        example_index_(example_index) {}

  std::uint64_t example_index() const { return example_index_; }

 private:
  std::uint64_t example_index_;
};

}  // namespace iwlearn
