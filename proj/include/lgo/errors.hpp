#pragma once

#include <stdexcept>
#include <string>

namespace lgo {

/// Malformed input: bad dimensions, unbounded or empty sets, schema errors.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Local problems whose utilities disagree where they overlap.
class IncompatibilityError : public std::runtime_error {
public:
  IncompatibilityError(const std::string& what, std::string first, std::string second)
      : std::runtime_error(what), first_(std::move(first)), second_(std::move(second)) {}

  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

private:
  std::string first_;
  std::string second_;
};

/// A desk-scale cap (degree, basis size, grid size) was exceeded.
class ResourceCapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lgo
