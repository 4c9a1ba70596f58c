#pragma once

// Brute-force reference for candidate validation. Works straight off the
// Factory with string role sets, inlines every call and walks every path,
// so it shares no machinery with the summary-based analysis. Only usable on
// small instances.

#include <compare>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

#include "rbacscan/model.hpp"
#include "rbacscan/policy.hpp"

namespace rbacscan::oracle {

struct OracleTuple {
  std::string entrypoint;
  std::string entity;
  AccessMode mode = AccessMode::Read;
  std::set<std::string> violating_roles;

  auto operator<=>(const OracleTuple&) const = default;
  bool operator==(const OracleTuple&) const = default;
};

struct OracleBounds {
  std::size_t max_relevant_roles = 8;
  std::size_t max_inlined_nodes = 200;
  std::size_t max_call_depth = 8;
};

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Findings for (entrypoint, entity, mode): for every access node, the maximal
// violating role sets over all feasible inlined paths, projected to tuples.
// Throws InstanceTooLarge when the instance exceeds `bounds`.
std::set<OracleTuple> oracle_analyze(const Factory& factory, const std::string& entrypoint,
                                     const std::string& entity, AccessMode mode, const Policy& policy,
                                     int max_atoms = 16, const OracleBounds& bounds = {});

}  // namespace rbacscan::oracle
