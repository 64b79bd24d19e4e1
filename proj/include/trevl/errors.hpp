#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trevl {

/// Input that violates a data contract (non-finite score, malformed record).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed line in a run or qrel stream. `line()` is 1-based.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A (query, document) pair was supplied twice.
class DuplicateError : public InputError {
 public:
  using InputError::InputError;
};

class UnknownMeasureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyAggregateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BenchmarkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// API misuse, e.g. stepping an environment whose episode has finished.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace trevl
