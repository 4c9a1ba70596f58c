#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbacscan/factory_index.hpp"

namespace rbacscan {

using CgNodeId = std::uint32_t;

enum class CgNodeKind { Entrypoint, Action, Access, Entity };

std::string_view to_string(CgNodeKind kind);

struct CgNode {
  CgNodeKind kind = CgNodeKind::Action;
  // Qualified routine name, "Container@mode(Entity)" for accesses, or the
  // entity name.
  std::string label;
  RoutineId routine = 0;  // entrypoint, action, and owning routine of an access
  EntityId entity = 0;    // access and entity nodes
  AccessMode mode = AccessMode::Read;
  bool orphan = false;    // action not reachable from any entrypoint
};

// Synthesized factory model: entrypoints, actions, access primitives and
// entities. Role primitives and conditions stay in the per-routine CFGs
// reachable through the FactoryIndex.
class CallGraph {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return targets_.size(); }

  const CgNode& node(CgNodeId id) const { return nodes_[id]; }
  const std::vector<CgNode>& nodes() const { return nodes_; }

  // Sorted by node id.
  std::span<const CgNodeId> successors(CgNodeId id) const {
    return {targets_.data() + offsets_[id], targets_.data() + offsets_[id + 1]};
  }
  std::span<const CgNodeId> predecessors(CgNodeId id) const {
    return {pred_targets_.data() + pred_offsets_[id], pred_targets_.data() + pred_offsets_[id + 1]};
  }

  CgNodeId node_of_routine(RoutineId routine) const { return routine_node_[routine]; }
  std::optional<CgNodeId> node_of_entity(EntityId entity) const;
  std::optional<CgNodeId> access_node(RoutineId routine, EntityId entity, AccessMode mode) const;

  std::int64_t build_millis() const { return build_millis_; }
  std::size_t approximate_bytes() const;

 private:
  friend CallGraph build_call_graph(const Factory&, const FactoryIndex&);

  std::vector<CgNode> nodes_;
  std::vector<std::uint32_t> offsets_;
  std::vector<CgNodeId> targets_;
  std::vector<std::uint32_t> pred_offsets_;
  std::vector<CgNodeId> pred_targets_;
  std::vector<CgNodeId> routine_node_;
  std::vector<CgNodeId> entity_node_;  // kNoNode when never accessed
  std::int64_t build_millis_ = 0;
};

CallGraph build_call_graph(const Factory& factory, const FactoryIndex& index);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::int64_t build_millis = 0;
  std::size_t approximate_resident_bytes = 0;
};

GraphStats graph_stats(const CallGraph& graph);

// Debug dumps: JSON adjacency list and Graphviz DOT.
std::string call_graph_json(const CallGraph& graph);
std::string call_graph_dot(const CallGraph& graph);

}  // namespace rbacscan
