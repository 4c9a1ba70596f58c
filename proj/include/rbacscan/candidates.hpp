#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "rbacscan/callgraph.hpp"
#include "rbacscan/factory_index.hpp"
#include "rbacscan/policy.hpp"

namespace rbacscan {

using CallPath = std::vector<CgNodeId>;

// A call-graph path from an under-restricted entrypoint to a protected entity.
// Role primitives have not been looked at yet.
struct Candidate {
  RoutineId entrypoint = 0;
  EntityId entity = 0;
  AccessMode mode = AccessMode::Read;
  std::set<std::string> violating_roles;
  // Simple paths entrypoint -> ... -> access -> entity, shortest first;
  // empty when the search ran without keep_paths.
  std::vector<CallPath> call_paths;
  bool truncated = false;
  // Every access node of (entity, mode) reachable from the entrypoint.
  std::vector<CgNodeId> access_nodes;
};

// (allowed_roles(entrypoint) ∪ defaults) \ rule roles for `mode`.
std::set<std::string> violating_roles(const Entrypoint& entrypoint, const PolicyRule& rule, AccessMode mode,
                                      const std::set<std::string>& defaults);

struct SearchOptions {
  std::size_t max_paths = 1000;
  // Off: call_paths stays empty and only `truncated` is computed.
  bool keep_paths = true;
};

// One candidate per (entrypoint, entity, mode) with a non-empty violating set
// and at least one path; sorted by (entrypoint name, entity name, mode).
std::vector<Candidate> find_candidates(const CallGraph& graph, const Policy& policy, const FactoryIndex& index,
                                       const SearchOptions& options = {});

std::vector<std::string> path_labels(const CallGraph& graph, const CallPath& path);

}  // namespace rbacscan
