#include "rbacscan/roleflow.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>

namespace rbacscan {

namespace {

// Condition tree with atoms replaced by bit positions.
struct CompiledCondition {
  Condition::Op op = Condition::Op::Opaque;
  int atom = -1;
  std::vector<CompiledCondition> args;

  bool eval(std::uint32_t assignment) const {
    switch (op) {
      case Condition::Op::CheckRole:
      case Condition::Op::Opaque: return ((assignment >> atom) & 1U) != 0;
      case Condition::Op::Not: return !args[0].eval(assignment);
      case Condition::Op::And:
        for (const auto& a : args) {
          if (!a.eval(assignment)) return false;
        }
        return true;
      case Condition::Op::Or:
        for (const auto& a : args) {
          if (a.eval(assignment)) return true;
        }
        return false;
    }
    return false;
  }
};

CompiledCondition compile(const Condition& cond, const std::map<std::string, int>& roles,
                          const std::map<std::string, int>& opaques) {
  CompiledCondition c;
  c.op = cond.op;
  if (cond.op == Condition::Op::CheckRole) c.atom = roles.at(cond.name);
  if (cond.op == Condition::Op::Opaque) c.atom = opaques.at(cond.name);
  for (const auto& a : cond.args) c.args.push_back(compile(a, roles, opaques));
  return c;
}

// Enumeration is capped at this many atoms regardless of max_atoms.
constexpr int kEnumerationCeiling = 24;

}  // namespace

BranchImplications branch_implications(const Condition& cond, bool branch, int max_atoms) {
  const ConditionAtoms atoms = condition_atoms(cond);
  const int n = static_cast<int>(atoms.roles.size() + atoms.opaque_ids.size());
  if (n > max_atoms || n > kEnumerationCeiling) return {};

  std::map<std::string, int> role_bit;
  std::map<std::string, int> opaque_bit;
  std::vector<std::string> role_names;
  for (const auto& r : atoms.roles) {
    role_bit[r] = static_cast<int>(role_names.size());
    role_names.push_back(r);
  }
  int next = static_cast<int>(role_names.size());
  for (const auto& o : atoms.opaque_ids) opaque_bit[o] = next++;

  const CompiledCondition compiled = compile(cond, role_bit, opaque_bit);
  const std::uint32_t role_mask = (std::uint32_t{1} << role_names.size()) - 1;
  std::uint32_t always_true = role_mask;
  std::uint32_t always_false = role_mask;
  bool satisfiable = false;
  for (std::uint32_t a = 0; a < (std::uint32_t{1} << n); ++a) {
    if (compiled.eval(a) != branch) continue;
    satisfiable = true;
    always_true &= a;
    always_false &= ~a;
  }

  BranchImplications out;
  out.satisfiable = satisfiable;
  if (!satisfiable) return out;
  for (std::size_t i = 0; i < role_names.size(); ++i) {
    if ((always_true >> i) & 1U) out.entailed_true.insert(role_names[i]);
    if ((always_false >> i) & 1U) out.entailed_false.insert(role_names[i]);
  }
  return out;
}

RoleImplications resolve_implications(const BranchImplications& impl, const FactoryIndex& index) {
  return {index.roles_of(impl.entailed_true), index.roles_of(impl.entailed_false), impl.satisfiable};
}

std::optional<RoleState> apply_transfer(const RoleState& state, const CompiledNode& node,
                                        const RoleImplications* impl) {
  switch (node.kind) {
    case NodeKind::Grant: {
      RoleState out = state;
      out.has.insert(node.role);
      out.may.insert(node.role);
      return out;
    }
    case NodeKind::Revoke: {
      RoleState out = state;
      out.has.erase(node.role);
      out.may.erase(node.role);
      return out;
    }
    case NodeKind::Cond: {
      if (impl == nullptr || !impl->satisfiable) return std::nullopt;
      if (!impl->entailed_true.is_subset_of(state.may)) return std::nullopt;
      if (impl->entailed_false.intersects(state.has)) return std::nullopt;
      RoleState out{state.has | impl->entailed_true, state.may - impl->entailed_false};
      return out;
    }
    default:
      return state;
  }
}

std::optional<RoleSet> flaw_at_access(const RoleState& state, const RoleSet& allowed) {
  if (state.has.intersects(allowed)) return std::nullopt;
  RoleSet violating = state.may - allowed;
  if (violating.empty()) return std::nullopt;
  return violating;
}

std::optional<RoleSet> flaw_at_access(const RoleState& state, const PolicyRule& rule, AccessMode mode,
                                      const FactoryIndex& index) {
  return flaw_at_access(state, index.roles_of(rule.roles_for(mode)));
}

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return (h ^ v) * 0x100000001b3ULL + 0x9e3779b97f4a7c15ULL; }

struct StateHash {
  std::size_t operator()(const RoleState& s) const { return mix(s.has.hash(), s.may.hash()); }
};

struct ItemKey {
  std::uint32_t summary;
  std::uint32_t node;
  RoleState state;
  bool operator==(const ItemKey&) const = default;
};

struct ItemKeyHash {
  std::size_t operator()(const ItemKey& k) const {
    return mix(mix(StateHash{}(k.state), k.summary), k.node);
  }
};

struct SummaryKey {
  RoutineId routine;
  RoleState entry;
  bool operator==(const SummaryKey&) const = default;
};

struct SummaryKeyHash {
  std::size_t operator()(const SummaryKey& k) const { return mix(StateHash{}(k.entry), k.routine); }
};

}  // namespace

struct CachedSummary {
  std::vector<RoleState> exits;
  bool incomplete = false;
};

class SummaryCache {
 public:
  std::shared_ptr<const CachedSummary> find(const SummaryKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : it->second;
  }

  // First insertion wins; racing computations of one key agree anyway.
  std::shared_ptr<const CachedSummary> insert(SummaryKey key, std::shared_ptr<const CachedSummary> value) {
    std::unique_lock lock(mutex_);
    return map_.try_emplace(std::move(key), std::move(value)).first->second;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<SummaryKey, std::shared_ptr<const CachedSummary>, SummaryKeyHash> map_;
};

RoleflowContext::RoleflowContext(const FactoryIndex& index, const CallGraph& graph, const Policy& policy,
                                 AnalysisLimits limits)
    : index_(&index), graph_(&graph), policy_(&policy), limits_(limits) {
  const std::size_t n = index.routine_count();
  closure_roles_.resize(n);
  callers_.resize(n);
  slot_of_node_.resize(n);

  for (RoutineId r = 0; r < n; ++r) {
    const Routine& routine = index.routine(r);
    auto& slots = slot_of_node_[r];
    slots.assign(routine.nodes.size(), kNoNode);
    for (std::uint32_t i = 0; i < routine.nodes.size(); ++i) {
      const CompiledNode& node = routine.nodes[i];
      switch (node.kind) {
        case NodeKind::Grant:
        case NodeKind::Revoke: closure_roles_[r].insert(node.role); break;
        case NodeKind::Cond: {
          slots[i] = static_cast<std::uint32_t>(implications_.size());
          std::array<RoleImplications, 2> pair;
          for (bool b : {false, true}) {
            pair[b ? 1 : 0] = resolve_implications(branch_implications(*node.condition, b, limits.max_atoms), index);
          }
          implications_.push_back(std::move(pair));
          for (const auto& role : condition_atoms(*node.condition).roles) {
            closure_roles_[r].insert(*index.find_role(role));
          }
          break;
        }
        case NodeKind::Call: {
          auto& c = callers_[node.target];
          if (c.empty() || c.back() != r) c.push_back(r);
          break;
        }
        default: break;
      }
    }
  }
  for (auto& c : callers_) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  // Propagate closure roles from callees to callers until stable.
  std::deque<RoutineId> work;
  std::vector<bool> queued(n, true);
  for (RoutineId r = 0; r < n; ++r) work.push_back(r);
  while (!work.empty()) {
    RoutineId r = work.front();
    work.pop_front();
    queued[r] = false;
    for (RoutineId caller : callers_[r]) {
      if (closure_roles_[r].is_subset_of(closure_roles_[caller])) continue;
      closure_roles_[caller] |= closure_roles_[r];
      if (!queued[caller]) {
        queued[caller] = true;
        work.push_back(caller);
      }
    }
  }

  rule_roles_.resize(index.entity_count());
  has_rule_.assign(index.entity_count(), false);
  for (const auto& rule : policy.rules) {
    auto e = index.find_entity(rule.entity);
    if (!e) continue;
    has_rule_[*e] = true;
    rule_roles_[*e] = {index.roles_of(rule.read), index.roles_of(rule.write)};
  }

  // Tarjan over the caller relation; its SCCs are those of the call relation.
  scc_.assign(n, kNoNode);
  std::vector<std::uint32_t> order(n, kNoNode);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<RoutineId> stack;
  std::vector<std::pair<RoutineId, std::size_t>> frames;
  std::uint32_t counter = 0;
  std::uint32_t components = 0;
  for (RoutineId root = 0; root < n; ++root) {
    if (order[root] != kNoNode) continue;
    frames.push_back({root, 0});
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      if (edge < callers_[v].size()) {
        const RoutineId w = callers_[v][edge++];
        if (order[w] == kNoNode) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      const RoutineId done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == order[done]) {
        RoutineId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          scc_[w] = components;
        } while (w != done);
        ++components;
      }
    }
  }
  cache_ = std::make_unique<SummaryCache>();
}

RoleflowContext::~RoleflowContext() = default;

const RoleImplications& RoleflowContext::implications(RoutineId r, std::uint32_t node, bool branch) const {
  return implications_[slot_of_node_[r][node]][branch ? 1 : 0];
}

const RoleSet& RoleflowContext::rule_roles(EntityId entity, AccessMode mode) const {
  return rule_roles_[entity][mode == AccessMode::Read ? 0 : 1];
}

namespace {

enum class Pred : std::uint8_t { Root, Intra, Entry, Return };

struct Item {
  std::uint32_t summary;
  std::uint32_t node;
  RoleState state;
  Pred pred;
  std::uint32_t from;  // predecessor item (Intra), calling item (Entry, Return)
};

struct Summary {
  RoutineId routine;
  // Entry states of routines that cannot reach the target access are
  // projected onto their closure roles; other roles pass through untouched.
  bool projected;
  std::uint32_t creator;  // call item that first demanded it; kNoNode for the root
  std::vector<RoleState> exits;
  std::unordered_set<RoleState, StateHash> exit_set;
  std::vector<std::uint32_t> callers;  // call items waiting on exits
};

class Tabulator {
 public:
  // One walk from the entrypoint shared by `candidates`. The role state does
  // not depend on the target, so all targets are checked along the way.
  Tabulator(const RoleflowContext& ctx, std::vector<const Candidate*> candidates)
      : ctx_(ctx),
        index_(ctx.index()),
        candidates_(std::move(candidates)),
        reaches_target_(index_.routine_count(), false),
        flaws_(candidates_.size()) {
    // Routines whose call closure contains a matching access.
    std::deque<RoutineId> work;
    for (std::uint32_t k = 0; k < candidates_.size(); ++k) {
      const Candidate& c = *candidates_[k];
      target_of_.emplace(target_key(c.entity, c.mode), k);
      for (CgNodeId acc : c.access_nodes) {
        RoutineId r = ctx.graph().node(acc).routine;
        if (!reaches_target_[r]) {
          reaches_target_[r] = true;
          work.push_back(r);
        }
      }
    }
    while (!work.empty()) {
      RoutineId r = work.front();
      work.pop_front();
      for (RoutineId c : ctx.callers(r)) {
        if (!reaches_target_[c]) {
          reaches_target_[c] = true;
          work.push_back(c);
        }
      }
    }
  }

  // Summary of `root`, which reaches no target, for the shared cache. Only
  // callees in root's SCC are tabulated here; the rest come from the cache,
  // so the work done (and whether the limit is hit) depends on the key alone.
  Tabulator(const RoleflowContext& ctx, RoutineId root) : ctx_(ctx), index_(ctx.index()), root_scc_(ctx.scc(root)) {}

  bool incomplete() const { return incomplete_; }

  std::vector<CandidateAnalysis> run() {
    const RoutineId entrypoint = candidates_.front()->entrypoint;
    const Routine& ep = index_.routine(entrypoint);
    RoleState init;
    init.may = (ep.allowed_roles | index_.default_roles()) & index_.relevant_roles();
    const std::uint32_t root = new_summary(entrypoint, init, kNoNode);
    propagate(root, ep.start, init, Pred::Root, kNoNode);
    drain();
    return finish();
  }

  std::shared_ptr<const CachedSummary> run_shared(RoutineId routine, const RoleState& entry) {
    const std::uint32_t root = new_summary(routine, entry, kNoNode);
    propagate(root, index_.routine(routine).start, entry, Pred::Root, kNoNode);
    drain();
    auto out = std::make_shared<CachedSummary>();
    out->incomplete = incomplete_;
    if (!incomplete_) out->exits = std::move(summaries_[root].exits);
    return out;
  }

 private:
  static std::uint64_t target_key(EntityId entity, AccessMode mode) {
    return (std::uint64_t{entity} << 1) | (mode == AccessMode::Write ? 1U : 0U);
  }

  bool projected(RoutineId r) const { return candidates_.empty() || !reaches_target_[r]; }

  void drain() {
    while (!work_.empty() && !incomplete_) {
      const std::uint32_t id = work_.front();
      work_.pop_front();
      process(id);
    }
  }

  std::uint32_t new_summary(RoutineId routine, const RoleState& entry, std::uint32_t creator) {
    const auto id = static_cast<std::uint32_t>(summaries_.size());
    Summary s;
    s.routine = routine;
    s.projected = projected(routine);
    s.creator = creator;
    summaries_.push_back(std::move(s));
    summary_ids_.emplace(SummaryKey{routine, entry}, id);
    return id;
  }

  void propagate(std::uint32_t summary, std::uint32_t node, RoleState state, Pred pred, std::uint32_t from) {
    if (incomplete_) return;
    ItemKey key{summary, node, state};
    if (item_ids_.contains(key)) return;
    if (items_.size() >= ctx_.limits().max_summary_states) {
      incomplete_ = true;
      return;
    }
    const auto id = static_cast<std::uint32_t>(items_.size());
    item_ids_.emplace(std::move(key), id);
    items_.push_back({summary, node, std::move(state), pred, from});
    work_.push_back(id);
  }

  void process(std::uint32_t id) {
    // Copies: items_ may reallocate below.
    const std::uint32_t summary = items_[id].summary;
    const std::uint32_t node_index = items_[id].node;
    const RoleState state = items_[id].state;
    const RoutineId routine = summaries_[summary].routine;
    const CompiledNode& node = index_.routine(routine).nodes[node_index];

    switch (node.kind) {
      case NodeKind::Start:
      case NodeKind::Other:
        propagate(summary, node.next, state, Pred::Intra, id);
        break;
      case NodeKind::Access:
        if (!summaries_[summary].projected) check_access(id, routine, node_index, node, state);
        propagate(summary, node.next, state, Pred::Intra, id);
        break;
      case NodeKind::Grant:
      case NodeKind::Revoke:
        propagate(summary, node.next, *apply_transfer(state, node), Pred::Intra, id);
        break;
      case NodeKind::Cond:
        for (bool branch : {true, false}) {
          const auto& impl = ctx_.implications(routine, node_index, branch);
          if (auto next = apply_transfer(state, node, &impl)) {
            propagate(summary, branch ? node.next_true : node.next, std::move(*next), Pred::Intra, id);
          }
        }
        break;
      case NodeKind::Call:
        call(id, node, state);
        break;
      case NodeKind::End:
        if (summaries_[summary].exit_set.insert(state).second) {
          summaries_[summary].exits.push_back(state);
          const auto callers = summaries_[summary].callers;
          for (std::uint32_t c : callers) resume(c, routine, summaries_[summary].projected, state);
        }
        break;
    }
  }

  void call(std::uint32_t item, const CompiledNode& node, const RoleState& state) {
    const RoutineId target = node.target;
    const bool project = projected(target);
    RoleState entry = state;
    if (project) {
      const RoleSet& k = ctx_.closure_roles(target);
      entry.has &= k;
      entry.may &= k;
    }
    if (project && !(candidates_.empty() && ctx_.scc(target) == root_scc_)) {
      const auto shared = shared_summary(target, entry);
      if (shared->incomplete) {
        incomplete_ = true;
        return;
      }
      for (const auto& exit : shared->exits) resume(item, target, true, exit);
      return;
    }
    std::uint32_t callee;
    auto it = summary_ids_.find(SummaryKey{target, entry});
    if (it == summary_ids_.end()) {
      callee = new_summary(target, entry, item);
      propagate(callee, index_.routine(target).start, entry, Pred::Entry, item);
    } else {
      callee = it->second;
    }
    summaries_[callee].callers.push_back(item);
    const auto exits = summaries_[callee].exits;
    for (const auto& exit : exits) resume(item, target, summaries_[callee].projected, exit);
  }

  void check_access(std::uint32_t id, RoutineId routine, std::uint32_t node_index, const CompiledNode& node,
                    const RoleState& state) {
    auto it = target_of_.find(target_key(node.entity, node.mode));
    if (it == target_of_.end()) return;
    const Candidate& c = *candidates_[it->second];
    auto violating = flaw_at_access(state, ctx_.rule_roles(c.entity, c.mode));
    if (!violating) return;
    auto& seen = flaws_[it->second][{routine, node_index}];
    const bool known = std::any_of(seen.begin(), seen.end(), [&](const auto& f) { return f.first == *violating; });
    if (!known) seen.emplace_back(std::move(*violating), id);
  }

  std::shared_ptr<const CachedSummary> shared_summary(RoutineId routine, const RoleState& entry) {
    SummaryKey key{routine, entry};
    if (auto hit = ctx_.cache().find(key)) return hit;
    auto computed = Tabulator(ctx_, routine).run_shared(routine, entry);
    return ctx_.cache().insert(std::move(key), std::move(computed));
  }

  // Continue after the call at `call_item` returns from `callee` in `exit`.
  void resume(std::uint32_t call_item, RoutineId callee, bool callee_projected, const RoleState& exit) {
    const Item& c = items_[call_item];
    RoleState after = exit;
    if (callee_projected) {
      const RoleSet& k = ctx_.closure_roles(callee);
      after.has |= c.state.has - k;
      after.may |= c.state.may - k;
    }
    const RoutineId routine = summaries_[c.summary].routine;
    const std::uint32_t next = index_.routine(routine).nodes[c.node].next;
    propagate(c.summary, next, std::move(after), Pred::Return, call_item);
  }

  std::vector<WitnessStep> witness(std::uint32_t id) const {
    std::vector<WitnessStep> steps;
    for (std::uint32_t cur = id;;) {
      const Item& it = items_[cur];
      const Routine& r = index_.routine(summaries_[it.summary].routine);
      steps.push_back({r.qualified_name, r.nodes[it.node].source->id});
      if (it.pred == Pred::Root) break;
      cur = it.from;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
  }

  // Call-graph path along the first-discovery call chain, loop-erased so it
  // stays simple under recursion.
  CallPath call_path(std::uint32_t id, RoutineId container, const Candidate& candidate) const {
    std::vector<RoutineId> chain;
    for (std::uint32_t s = items_[id].summary;;) {
      chain.push_back(summaries_[s].routine);
      const std::uint32_t creator = summaries_[s].creator;
      if (creator == kNoNode) break;
      s = items_[creator].summary;
    }
    std::reverse(chain.begin(), chain.end());
    std::vector<RoutineId> erased;
    for (RoutineId r : chain) {
      auto pos = std::find(erased.begin(), erased.end(), r);
      if (pos != erased.end()) erased.erase(pos + 1, erased.end());
      else erased.push_back(r);
    }
    const CallGraph& g = ctx_.graph();
    CallPath path;
    for (RoutineId r : erased) path.push_back(g.node_of_routine(r));
    path.push_back(*g.access_node(container, candidate.entity, candidate.mode));
    path.push_back(*g.node_of_entity(candidate.entity));
    return path;
  }

  std::vector<CandidateAnalysis> finish() const {
    std::vector<CandidateAnalysis> all(candidates_.size());
    for (std::size_t k = 0; k < candidates_.size(); ++k) all[k] = finish(k);
    return all;
  }

  CandidateAnalysis finish(std::size_t k) const {
    const Candidate& candidate = *candidates_[k];
    CandidateAnalysis out;
    out.incomplete = incomplete_;
    out.summaries = summaries_.size();
    out.explored_states = items_.size();
    for (const auto& [where, found] : flaws_[k]) {
      for (const auto& [violating, item] : found) {
        const bool dominated = std::any_of(found.begin(), found.end(), [&](const auto& other) {
          return other.first != violating && violating.is_subset_of(other.first);
        });
        if (dominated) continue;
        Finding f;
        f.entrypoint = candidate.entrypoint;
        f.entity = candidate.entity;
        f.mode = candidate.mode;
        f.violating_roles = index_.names_of(violating);
        f.state_at_access = items_[item].state;
        f.container = where.first;
        f.access_node = where.second;
        f.witness = witness(item);
        f.call_path = call_path(item, where.first, candidate);
        f.truncated = candidate.truncated;
        out.findings.push_back(std::move(f));
      }
    }
    std::sort(out.findings.begin(), out.findings.end(), [&](const Finding& a, const Finding& b) {
      const auto& an = index_.routine(a.container).qualified_name;
      const auto& bn = index_.routine(b.container).qualified_name;
      return std::tie(an, a.access_node, a.violating_roles) < std::tie(bn, b.access_node, b.violating_roles);
    });
    return out;
  }

  const RoleflowContext& ctx_;
  const FactoryIndex& index_;
  std::vector<const Candidate*> candidates_;  // empty for a shared summary
  std::unordered_map<std::uint64_t, std::uint32_t> target_of_;
  std::vector<bool> reaches_target_;
  std::uint32_t root_scc_ = kNoNode;

  std::vector<Summary> summaries_;
  std::unordered_map<SummaryKey, std::uint32_t, SummaryKeyHash> summary_ids_;
  std::vector<Item> items_;
  std::unordered_map<ItemKey, std::uint32_t, ItemKeyHash> item_ids_;
  std::deque<std::uint32_t> work_;
  bool incomplete_ = false;
  // Per candidate: (routine, access node) -> distinct violating sets with the
  // item that first showed each.
  std::vector<std::map<std::pair<RoutineId, std::uint32_t>, std::vector<std::pair<RoleSet, std::uint32_t>>>> flaws_;
};

}  // namespace

CandidateAnalysis analyze_candidate(const RoleflowContext& ctx, const Candidate& candidate) {
  return Tabulator(ctx, {&candidate}).run().front();
}

std::vector<CandidateAnalysis> analyze_entrypoint(const RoleflowContext& ctx,
                                                  const std::vector<const Candidate*>& candidates) {
  if (candidates.empty()) return {};
  Tabulator joint(ctx, candidates);
  auto out = joint.run();
  if (!joint.incomplete() || candidates.size() == 1) return out;
  // The joint walk ran out of room; each candidate alone may not.
  for (std::size_t k = 0; k < candidates.size(); ++k) out[k] = analyze_candidate(ctx, *candidates[k]);
  return out;
}

}  // namespace rbacscan
