#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rbacscan/model.hpp"

namespace rbacscan {

// Roles allowed to read and to write one entity.
struct PolicyRule {
  std::string entity;
  std::set<std::string> read;
  std::set<std::string> write;

  const std::set<std::string>& roles_for(AccessMode mode) const {
    return mode == AccessMode::Read ? read : write;
  }

  bool operator==(const PolicyRule&) const = default;
};

struct Policy {
  std::vector<PolicyRule> rules;

  const PolicyRule* find(std::string_view entity) const;

  bool operator==(const Policy&) const = default;
};

std::vector<Violation> validate_policy(const Policy& policy, const Factory& factory);

}  // namespace rbacscan
