#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainroute {

/// A vertex label or structure id that does not exist.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A caller violated an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A structure references a child that is not registered, or the
/// reference graph is malformed.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  malformed_header,
  non_square,
  duplicate_label,
  loop,
  bad_entry,
};

const char* to_string(ParseErrorKind kind) noexcept;

/// Adjacency-matrix input error. `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& message);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

/// Scenario file error, located by section name and 1-based line.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string section, std::size_t line, const std::string& message);

  const std::string& section() const noexcept { return section_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string section_;
  std::size_t line_;
};

}  // namespace chainroute
