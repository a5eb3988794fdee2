#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mincond {

// Invalid arguments are reported with std::invalid_argument and bad subset
// indices with std::out_of_range. The types below cover the remaining
// failure modes callers need to tell apart.

/// Gram matrix of the selected columns is (numerically) rank deficient.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, std::vector<std::size_t> subset)
      : std::runtime_error(what), subset_(std::move(subset)) {}

  const std::vector<std::size_t>& subset() const noexcept { return subset_; }

 private:
  std::vector<std::size_t> subset_;
};

/// A requested computation exceeds the configured evaluation budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Active sensors cannot localize a source (collinear or too few).
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mincond
