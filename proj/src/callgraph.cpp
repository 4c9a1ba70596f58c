#include "rbacscan/callgraph.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <tuple>

#include "json.hpp"

namespace rbacscan {

std::string_view to_string(CgNodeKind kind) {
  switch (kind) {
    case CgNodeKind::Entrypoint: return "entrypoint";
    case CgNodeKind::Action: return "action";
    case CgNodeKind::Access: return "access";
    case CgNodeKind::Entity: return "entity";
  }
  return "?";
}

std::optional<CgNodeId> CallGraph::node_of_entity(EntityId entity) const {
  if (entity >= entity_node_.size() || entity_node_[entity] == kNoNode) return std::nullopt;
  return entity_node_[entity];
}

std::optional<CgNodeId> CallGraph::access_node(RoutineId routine, EntityId entity, AccessMode mode) const {
  for (CgNodeId s : successors(routine_node_[routine])) {
    const CgNode& n = nodes_[s];
    if (n.kind == CgNodeKind::Access && n.routine == routine && n.entity == entity && n.mode == mode) return s;
  }
  return std::nullopt;
}

std::size_t CallGraph::approximate_bytes() const {
  std::size_t bytes = sizeof(*this);
  bytes += nodes_.capacity() * sizeof(CgNode);
  for (const auto& n : nodes_) bytes += n.label.capacity() > 15 ? n.label.capacity() + 1 : 0;
  bytes += (offsets_.capacity() + pred_offsets_.capacity()) * sizeof(std::uint32_t);
  bytes += (targets_.capacity() + pred_targets_.capacity()) * sizeof(CgNodeId);
  bytes += (routine_node_.capacity() + entity_node_.capacity()) * sizeof(CgNodeId);
  return bytes;
}

CallGraph build_call_graph(const Factory& factory, const FactoryIndex& index) {
  const auto t0 = std::chrono::steady_clock::now();
  CallGraph g;

  // Routine nodes first, in factory order.
  g.routine_node_.resize(index.routine_count());
  for (RoutineId r = 0; r < index.routine_count(); ++r) {
    const Routine& routine = index.routine(r);
    CgNode n;
    n.kind = routine.is_screen ? CgNodeKind::Entrypoint : CgNodeKind::Action;
    n.label = routine.qualified_name;
    n.routine = r;
    g.routine_node_[r] = static_cast<CgNodeId>(g.nodes_.size());
    g.nodes_.push_back(std::move(n));
  }

  // Access nodes per (routine, entity, mode) in order of first occurrence.
  std::vector<std::pair<CgNodeId, CgNodeId>> edges;
  std::vector<bool> entity_used(index.entity_count(), false);
  std::vector<std::tuple<RoutineId, EntityId, AccessMode>> accesses;
  for (RoutineId r = 0; r < index.routine_count(); ++r) {
    const Routine& routine = index.routine(r);
    std::vector<std::pair<EntityId, AccessMode>> local;
    for (const auto& node : routine.nodes) {
      if (node.kind == NodeKind::Call) {
        edges.emplace_back(g.routine_node_[r], g.routine_node_[node.target]);
      } else if (node.kind == NodeKind::Access) {
        auto key = std::make_pair(node.entity, node.mode);
        if (std::find(local.begin(), local.end(), key) == local.end()) local.push_back(key);
      }
    }
    for (auto [entity, mode] : local) {
      accesses.emplace_back(r, entity, mode);
      entity_used[entity] = true;
    }
  }
  std::vector<CgNodeId> access_ids;
  access_ids.reserve(accesses.size());
  for (auto [r, entity, mode] : accesses) {
    CgNode n;
    n.kind = CgNodeKind::Access;
    n.routine = r;
    n.entity = entity;
    n.mode = mode;
    n.label = index.routine(r).qualified_name + "@" + std::string(to_string(mode)) + "(" + index.entity(entity).name + ")";
    access_ids.push_back(static_cast<CgNodeId>(g.nodes_.size()));
    g.nodes_.push_back(std::move(n));
  }

  g.entity_node_.assign(index.entity_count(), kNoNode);
  for (EntityId e = 0; e < index.entity_count(); ++e) {
    if (!entity_used[e]) continue;
    CgNode n;
    n.kind = CgNodeKind::Entity;
    n.entity = e;
    n.label = index.entity(e).name;
    g.entity_node_[e] = static_cast<CgNodeId>(g.nodes_.size());
    g.nodes_.push_back(std::move(n));
  }

  for (std::size_t i = 0; i < accesses.size(); ++i) {
    auto [r, entity, mode] = accesses[i];
    edges.emplace_back(g.routine_node_[r], access_ids[i]);
    edges.emplace_back(access_ids[i], g.entity_node_[entity]);
  }

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const std::size_t n = g.nodes_.size();
  g.offsets_.assign(n + 1, 0);
  g.pred_offsets_.assign(n + 1, 0);
  for (auto [from, to] : edges) {
    ++g.offsets_[from + 1];
    ++g.pred_offsets_[to + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    g.offsets_[i + 1] += g.offsets_[i];
    g.pred_offsets_[i + 1] += g.pred_offsets_[i];
  }
  g.targets_.resize(edges.size());
  g.pred_targets_.resize(edges.size());
  {
    std::vector<std::uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    std::vector<std::uint32_t> pfill(g.pred_offsets_.begin(), g.pred_offsets_.end() - 1);
    // edges are sorted by (from, to), so both adjacency lists come out sorted.
    for (auto [from, to] : edges) {
      g.targets_[fill[from]++] = to;
      g.pred_targets_[pfill[to]++] = from;
    }
  }

  // Orphan marking: actions not reachable from any entrypoint.
  std::vector<bool> seen(n, false);
  std::vector<CgNodeId> stack;
  for (CgNodeId i = 0; i < n; ++i) {
    if (g.nodes_[i].kind == CgNodeKind::Entrypoint) {
      seen[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    CgNodeId u = stack.back();
    stack.pop_back();
    for (CgNodeId v : g.successors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (CgNodeId i = 0; i < n; ++i) {
    if (g.nodes_[i].kind == CgNodeKind::Action && !seen[i]) g.nodes_[i].orphan = true;
  }

  (void)factory;
  g.build_millis_ =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

GraphStats graph_stats(const CallGraph& graph) {
  return {graph.node_count(), graph.edge_count(), graph.build_millis(), graph.approximate_bytes()};
}

std::string call_graph_json(const CallGraph& graph) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (CgNodeId i = 0; i < graph.node_count(); ++i) {
    const CgNode& n = graph.node(i);
    nlohmann::ordered_json j;
    j["id"] = i;
    j["kind"] = std::string(to_string(n.kind));
    j["label"] = n.label;
    if (n.kind == CgNodeKind::Action) j["orphan"] = n.orphan;
    nlohmann::ordered_json succ = nlohmann::ordered_json::array();
    for (CgNodeId s : graph.successors(i)) succ.push_back(s);
    j["successors"] = std::move(succ);
    nodes.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["node_count"] = graph.node_count();
  root["edge_count"] = graph.edge_count();
  root["nodes"] = std::move(nodes);
  return root.dump(2) + "\n";
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string call_graph_dot(const CallGraph& graph) {
  std::string out = "digraph callgraph {\n";
  for (CgNodeId i = 0; i < graph.node_count(); ++i) {
    const CgNode& n = graph.node(i);
    const char* shape = "box";
    switch (n.kind) {
      case CgNodeKind::Entrypoint: shape = "doubleoctagon"; break;
      case CgNodeKind::Action: shape = "box"; break;
      case CgNodeKind::Access: shape = "ellipse"; break;
      case CgNodeKind::Entity: shape = "cylinder"; break;
    }
    out += "  n" + std::to_string(i) + " [label=" + dot_quote(n.label) + ", shape=" + shape +
           (n.orphan ? ", style=dashed" : "") + "];\n";
  }
  for (CgNodeId i = 0; i < graph.node_count(); ++i) {
    for (CgNodeId s : graph.successors(i)) {
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(s) + ";\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace rbacscan
