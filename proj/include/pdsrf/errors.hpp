#pragma once

#include <stdexcept>
#include <string>

namespace pdsrf {

// Invalid argument to a pure operation (empty input, out-of-range value).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A leaf signature or cache was computed against an older forest epoch.
class StalenessError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid tunables or unusable input shape (too few blocks, bad generator spec).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pdsrf
