#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rbacscan/model.hpp"
#include "rbacscan/policy.hpp"

namespace rbacscan {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Schema, Semantic };

  ParseError(Kind kind, const std::string& message, std::vector<Violation> violations = {})
      : std::runtime_error(message), kind_(kind), violations_(std::move(violations)) {}

  Kind kind() const { return kind_; }
  // Populated for semantic errors.
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  Kind kind_;
  std::vector<Violation> violations_;
};

std::string_view to_string(ParseError::Kind kind);

// Parses and validates a factory document. Throws ParseError.
Factory parse_factory(std::string_view text);

// Parses a policy document and resolves it against `factory`. Throws ParseError.
Policy parse_policy(std::string_view text, const Factory& factory);

// Canonical form: fixed key order, sets as sorted arrays, two-space indent.
std::string serialize_factory(const Factory& factory);
std::string serialize_policy(const Policy& policy);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace rbacscan
