#include "rbacscan/candidates.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

namespace rbacscan {

std::set<std::string> violating_roles(const Entrypoint& entrypoint, const PolicyRule& rule, AccessMode mode,
                                      const std::set<std::string>& defaults) {
  std::set<std::string> entering = entrypoint.allowed_roles;
  entering.insert(defaults.begin(), defaults.end());
  const auto& allowed = rule.roles_for(mode);
  std::set<std::string> out;
  std::set_difference(entering.begin(), entering.end(), allowed.begin(), allowed.end(),
                      std::inserter(out, out.end()));
  return out;
}

std::vector<std::string> path_labels(const CallGraph& graph, const CallPath& path) {
  std::vector<std::string> out;
  out.reserve(path.size());
  for (CgNodeId n : path) out.push_back(graph.node(n).label);
  return out;
}

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Shortest-first enumeration of simple paths to the target set by iterative
// deepening: pass d collects the paths with exactly d edges and records
// whether the depth bound cut off any branch; if nothing was cut, no longer
// path exists.
class PathEnumerator {
 public:
  PathEnumerator(const CallGraph& graph, const std::vector<std::uint32_t>& dist, std::size_t cap, bool keep)
      : graph_(graph), dist_(dist), cap_(cap), keep_(keep), on_path_(graph.node_count(), false) {}

  // Without `keep` the paths are only counted, which is enough to tell
  // whether the cap was hit.
  void run(CgNodeId root, CgNodeId entity_node, std::vector<CallPath>& out, bool& truncated) {
    entity_node_ = entity_node;
    out_ = &out;
    found_ = 0;
    for (std::uint32_t depth = dist_[root];; ++depth) {
      cut_ = false;
      dfs(root, depth);
      if (found_ > cap_) {
        if (out.size() > cap_) out.resize(cap_);
        truncated = true;
        return;
      }
      if (!cut_) return;
    }
  }

 private:
  void dfs(CgNodeId u, std::uint32_t remaining) {
    if (found_ > cap_) return;
    on_path_[u] = true;
    path_.push_back(u);
    if (remaining == 0) {
      // dist_[u] == 0, so u is a target access node.
      ++found_;
      if (keep_) {
        CallPath p = path_;
        p.push_back(entity_node_);
        out_->push_back(std::move(p));
      }
    } else {
      for (CgNodeId v : graph_.successors(u)) {
        if (dist_[v] == kUnreached || on_path_[v]) continue;
        if (dist_[v] > remaining - 1) {
          cut_ = true;
          continue;
        }
        dfs(v, remaining - 1);
        if (found_ > cap_) break;
      }
    }
    path_.pop_back();
    on_path_[u] = false;
  }

  const CallGraph& graph_;
  const std::vector<std::uint32_t>& dist_;
  std::size_t cap_;
  bool keep_;
  CgNodeId entity_node_ = 0;
  std::size_t found_ = 0;
  std::vector<bool> on_path_;
  CallPath path_;
  std::vector<CallPath>* out_ = nullptr;
  bool cut_ = false;
};

}  // namespace

std::vector<Candidate> find_candidates(const CallGraph& graph, const Policy& policy, const FactoryIndex& index,
                                       const SearchOptions& options) {
  std::vector<Candidate> out;
  const std::size_t n = graph.node_count();
  std::vector<std::uint32_t> dist(n, kUnreached);
  std::vector<CgNodeId> touched;
  std::vector<bool> fwd_seen(n, false);
  std::vector<CgNodeId> fwd_touched;
  PathEnumerator paths(graph, dist, options.max_paths, options.keep_paths);

  for (const auto& rule : policy.rules) {
    auto entity = index.find_entity(rule.entity);
    if (!entity) continue;
    auto entity_node = graph.node_of_entity(*entity);
    if (!entity_node) continue;

    for (AccessMode mode : {AccessMode::Read, AccessMode::Write}) {
      // Reverse BFS from the (entity, mode) access nodes.
      std::deque<CgNodeId> queue;
      for (CgNodeId acc : graph.predecessors(*entity_node)) {
        if (graph.node(acc).mode != mode) continue;
        dist[acc] = 0;
        touched.push_back(acc);
        queue.push_back(acc);
      }
      if (queue.empty()) continue;
      std::vector<CgNodeId> entrypoints;
      while (!queue.empty()) {
        CgNodeId u = queue.front();
        queue.pop_front();
        if (graph.node(u).kind == CgNodeKind::Entrypoint) entrypoints.push_back(u);
        for (CgNodeId p : graph.predecessors(u)) {
          if (dist[p] != kUnreached) continue;
          dist[p] = dist[u] + 1;
          touched.push_back(p);
          queue.push_back(p);
        }
      }
      std::sort(entrypoints.begin(), entrypoints.end());

      for (CgNodeId ep : entrypoints) {
        const Routine& routine = index.routine(graph.node(ep).routine);
        auto roles = violating_roles(*routine.screen, rule, mode, index.factory().default_roles);
        if (roles.empty()) continue;

        Candidate c;
        c.entrypoint = graph.node(ep).routine;
        c.entity = *entity;
        c.mode = mode;
        c.violating_roles = std::move(roles);

        // Reachable targets, walking only nodes that can still reach one.
        std::vector<CgNodeId> stack{ep};
        fwd_seen[ep] = true;
        fwd_touched.push_back(ep);
        while (!stack.empty()) {
          CgNodeId u = stack.back();
          stack.pop_back();
          if (dist[u] == 0) c.access_nodes.push_back(u);
          for (CgNodeId v : graph.successors(u)) {
            if (dist[v] == kUnreached || fwd_seen[v]) continue;
            fwd_seen[v] = true;
            fwd_touched.push_back(v);
            stack.push_back(v);
          }
        }
        for (CgNodeId v : fwd_touched) fwd_seen[v] = false;
        fwd_touched.clear();
        std::sort(c.access_nodes.begin(), c.access_nodes.end());

        paths.run(ep, *entity_node, c.call_paths, c.truncated);
        out.push_back(std::move(c));
      }

      for (CgNodeId v : touched) dist[v] = kUnreached;
      touched.clear();
    }
  }

  std::sort(out.begin(), out.end(), [&](const Candidate& a, const Candidate& b) {
    const auto& an = index.routine(a.entrypoint).qualified_name;
    const auto& bn = index.routine(b.entrypoint).qualified_name;
    return std::tie(an, index.entity(a.entity).name, a.mode) < std::tie(bn, index.entity(b.entity).name, b.mode);
  });
  return out;
}

}  // namespace rbacscan
