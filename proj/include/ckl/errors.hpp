#pragma once

#include <stdexcept>
#include <string>

namespace ckl {

/// Labels contain a single class, so the centered ideal kernel is zero.
class DegenerateTargetError : public std::domain_error {
 public:
  explicit DegenerateTargetError(const std::string& what) : std::domain_error(what) {}
};

/// A centered Gram matrix entering an alignment is the zero matrix.
class DegenerateAlignmentError : public std::domain_error {
 public:
  explicit DegenerateAlignmentError(const std::string& what) : std::domain_error(what) {}
};

/// Every restart of the local search produced a non-finite objective.
class OptimizerFailure : public std::runtime_error {
 public:
  explicit OptimizerFailure(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ckl
