#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cpppkit {

/// Precondition violated by a caller (bad shape, out-of-range argument).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A model evaluation produced a non-finite value. Carries the MCMC
/// iteration (or replicate) index when one is known.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(index ? what + " (index " + std::to_string(*index) + ")" : what),
        index_(index) {}

  [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

private:
  std::optional<std::size_t> index_;
};

/// Malformed or unreadable input. `line()` is 1-based; 0 means no particular line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace cpppkit
