#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lgcf {

// Input that is well-formed but cannot be processed (empty graph, out of
// range ids, impossible sampling request, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DomainError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Caller broke an API precondition (dimension mismatch, stale cache).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lgcf
