#pragma once

// Candidate validation. A candidate is replayed over the CFGs reachable from
// its entrypoint while tracking which roles the current user definitely has
// and which it may have. Calls are handled with per-(routine, entry state)
// summaries computed to a fixpoint, so recursion terminates.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rbacscan/callgraph.hpp"
#include "rbacscan/candidates.hpp"
#include "rbacscan/factory_index.hpp"
#include "rbacscan/policy.hpp"
#include "rbacscan/role_set.hpp"

namespace rbacscan {

struct RoleState {
  RoleSet has;  // roles the user definitely holds
  RoleSet may;  // roles the user possibly holds; has ⊆ may

  bool operator==(const RoleState&) const = default;
  std::strong_ordering operator<=>(const RoleState&) const = default;
};

struct BranchImplications {
  std::set<std::string> entailed_true;
  std::set<std::string> entailed_false;
  bool satisfiable = true;

  bool operator==(const BranchImplications&) const = default;
};

inline constexpr int kDefaultMaxAtoms = 16;

// What taking `branch` out of a node guarded by `cond` tells us about the
// user's roles. Exact by truth-table enumeration up to `max_atoms` distinct
// atoms; beyond that nothing is entailed.
BranchImplications branch_implications(const Condition& cond, bool branch, int max_atoms = kDefaultMaxAtoms);

// Same, with roles resolved against an index.
struct RoleImplications {
  RoleSet entailed_true;
  RoleSet entailed_false;
  bool satisfiable = true;
};

RoleImplications resolve_implications(const BranchImplications& impl, const FactoryIndex& index);

// Successor state after leaving `node`; nullopt when the branch is infeasible.
// `impl` is required for cond nodes and ignored otherwise.
std::optional<RoleState> apply_transfer(const RoleState& state, const CompiledNode& node,
                                        const RoleImplications* impl = nullptr);

// Violating roles if the access is a flaw: the user holds none of `allowed`
// for sure and may hold something outside it.
std::optional<RoleSet> flaw_at_access(const RoleState& state, const RoleSet& allowed);
std::optional<RoleSet> flaw_at_access(const RoleState& state, const PolicyRule& rule, AccessMode mode,
                                      const FactoryIndex& index);

struct AnalysisLimits {
  int max_atoms = kDefaultMaxAtoms;
  // (node, role state) pairs one tabulation may explore: the candidate's own
  // walk over routines that can reach its target, or the computation of one
  // shared callee summary (see RoleflowContext).
  std::size_t max_summary_states = 100000;
  std::size_t max_paths = 1000;
};

struct WitnessStep {
  std::string container;  // qualified routine name
  std::string node;       // CFG node id

  bool operator==(const WitnessStep&) const = default;
  auto operator<=>(const WitnessStep&) const = default;
};

struct Finding {
  RoutineId entrypoint = 0;
  EntityId entity = 0;
  AccessMode mode = AccessMode::Read;
  std::set<std::string> violating_roles;
  RoleState state_at_access;
  RoutineId container = 0;      // routine holding the access node
  std::uint32_t access_node = 0;  // index into that routine's CFG
  std::vector<WitnessStep> witness;
  CallPath call_path;
  bool truncated = false;  // candidate path list was capped
};

struct CandidateAnalysis {
  std::vector<Finding> findings;
  bool incomplete = false;
  std::size_t summaries = 0;
  std::size_t explored_states = 0;
};

class SummaryCache;

// Per-(factory, policy) data shared by all candidate analyses. Callees that
// cannot reach a candidate's target behave the same for every candidate, so
// their summaries are memoized here; the cache is thread-safe and everything
// else is read-only.
class RoleflowContext {
 public:
  RoleflowContext(const FactoryIndex& index, const CallGraph& graph, const Policy& policy,
                  AnalysisLimits limits = {});
  ~RoleflowContext();
  RoleflowContext(const RoleflowContext&) = delete;
  RoleflowContext& operator=(const RoleflowContext&) = delete;

  const FactoryIndex& index() const { return *index_; }
  const CallGraph& graph() const { return *graph_; }
  const Policy& policy() const { return *policy_; }
  const AnalysisLimits& limits() const { return limits_; }

  // Roles that cond/grant/revoke nodes can observe or change anywhere in the
  // routine or its transitive callees.
  const RoleSet& closure_roles(RoutineId r) const { return closure_roles_[r]; }
  const std::vector<RoutineId>& callers(RoutineId r) const { return callers_[r]; }
  const RoleImplications& implications(RoutineId r, std::uint32_t node, bool branch) const;
  const RoleSet& rule_roles(EntityId entity, AccessMode mode) const;
  bool has_rule(EntityId entity) const { return has_rule_[entity]; }
  // Strongly connected component of the routine call graph.
  std::uint32_t scc(RoutineId r) const { return scc_[r]; }
  SummaryCache& cache() const { return *cache_; }

 private:
  const FactoryIndex* index_;
  const CallGraph* graph_;
  const Policy* policy_;
  AnalysisLimits limits_;
  std::vector<RoleSet> closure_roles_;
  std::vector<std::vector<RoutineId>> callers_;
  // [false, true] per cond node; slot_of_node_[r][n] indexes it.
  std::vector<std::array<RoleImplications, 2>> implications_;
  std::vector<std::vector<std::uint32_t>> slot_of_node_;
  std::vector<std::array<RoleSet, 2>> rule_roles_;
  std::vector<bool> has_rule_;
  std::vector<std::uint32_t> scc_;
  std::unique_ptr<SummaryCache> cache_;
};

CandidateAnalysis analyze_candidate(const RoleflowContext& ctx, const Candidate& candidate);

// Candidates sharing one entrypoint, analyzed in a single walk. Findings match
// analyze_candidate's up to the choice of witness; a walk that hits the state
// limit falls back to one walk per candidate.
std::vector<CandidateAnalysis> analyze_entrypoint(const RoleflowContext& ctx,
                                                  const std::vector<const Candidate*>& candidates);

}  // namespace rbacscan
