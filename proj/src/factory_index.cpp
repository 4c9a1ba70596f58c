#include "rbacscan/factory_index.hpp"

namespace rbacscan {

std::optional<RoutineId> FactoryIndex::find_routine(std::string_view qualified) const {
  auto it = routine_by_name_.find(std::string(qualified));
  if (it == routine_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityId> FactoryIndex::find_entity(std::string_view name) const {
  auto it = entity_by_name_.find(std::string(name));
  if (it == entity_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<RoleId> FactoryIndex::find_role(std::string_view name) const {
  auto it = role_by_name_.find(std::string(name));
  if (it == role_by_name_.end()) return std::nullopt;
  return it->second;
}

RoleSet FactoryIndex::roles_of(const std::set<std::string>& names) const {
  RoleSet out;
  for (const auto& n : names) {
    auto id = find_role(n);
    if (!id) throw IndexError("unknown role '" + n + "'");
    out.insert(*id);
  }
  return out;
}

std::set<std::string> FactoryIndex::names_of(const RoleSet& roles) const {
  std::set<std::string> out;
  roles.for_each([&](RoleId id) { out.insert(role_names_.at(id)); });
  return out;
}

namespace {

void add_condition_roles(const Condition& cond, const FactoryIndex& index, RoleSet& out) {
  if (cond.op == Condition::Op::CheckRole) {
    auto id = index.find_role(cond.name);
    if (!id) throw IndexError("unknown role '" + cond.name + "' in condition");
    out.insert(*id);
  }
  for (const auto& arg : cond.args) add_condition_roles(arg, index, out);
}

}  // namespace

FactoryIndex index_factory(const Factory& factory, const Policy* policy) {
  FactoryIndex index;
  index.factory_ = &factory;

  // std::set iteration gives ids in name order.
  for (const auto& role : factory.roles) {
    index.role_by_name_.emplace(role, static_cast<RoleId>(index.role_names_.size()));
    index.role_names_.push_back(role);
  }
  index.default_roles_ = index.roles_of(factory.default_roles);
  index.relevant_roles_ = index.default_roles_;

  for (const auto& e : factory.entities) {
    index.entity_by_name_.emplace(e.name, static_cast<EntityId>(index.entities_.size()));
    index.entities_.push_back(&e);
  }

  for (std::uint32_t mi = 0; mi < factory.modules.size(); ++mi) {
    const auto& m = factory.modules[mi];
    for (const auto& s : m.screens) {
      Routine r;
      r.qualified_name = qualified_name(m.name, s.name);
      r.module = mi;
      r.is_screen = true;
      r.screen = &s;
      r.cfg = &s.cfg;
      r.allowed_roles = index.roles_of(s.allowed_roles);
      index.relevant_roles_ |= r.allowed_roles;
      index.routine_by_name_.emplace(r.qualified_name, static_cast<RoutineId>(index.routines_.size()));
      index.routines_.push_back(std::move(r));
    }
    for (const auto& a : m.actions) {
      Routine r;
      r.qualified_name = qualified_name(m.name, a.name);
      r.module = mi;
      r.action = &a;
      r.cfg = &a.cfg;
      index.routine_by_name_.emplace(r.qualified_name, static_cast<RoutineId>(index.routines_.size()));
      index.routines_.push_back(std::move(r));
    }
  }

  for (auto& r : index.routines_) {
    const Cfg& cfg = *r.cfg;
    std::unordered_map<std::string_view, std::uint32_t> node_by_id;
    node_by_id.reserve(cfg.nodes.size());
    r.nodes.resize(cfg.nodes.size());
    bool has_start = false;
    for (std::uint32_t i = 0; i < cfg.nodes.size(); ++i) {
      const CfgNode& src = cfg.nodes[i];
      node_by_id.emplace(src.id, i);
      CompiledNode& n = r.nodes[i];
      n.kind = src.kind();
      n.source = &src;
      switch (n.kind) {
        case NodeKind::Start:
          r.start = i;
          has_start = true;
          break;
        case NodeKind::Cond:
          n.condition = &std::get<CondNode>(src.payload).condition;
          add_condition_roles(*n.condition, index, index.relevant_roles_);
          break;
        case NodeKind::Call: {
          const auto& target = std::get<CallNode>(src.payload).target;
          auto id = index.find_routine(target);
          if (!id || index.routines_[*id].is_screen) {
            throw IndexError(r.qualified_name + ": call target '" + target + "' is not an action");
          }
          n.target = *id;
          break;
        }
        case NodeKind::Access: {
          const auto& acc = std::get<AccessNode>(src.payload);
          auto id = index.find_entity(acc.entity);
          if (!id) throw IndexError(r.qualified_name + ": unknown entity '" + acc.entity + "'");
          n.entity = *id;
          n.mode = acc.mode;
          break;
        }
        case NodeKind::Grant:
        case NodeKind::Revoke: {
          const auto& role = n.kind == NodeKind::Grant ? std::get<GrantNode>(src.payload).role
                                                       : std::get<RevokeNode>(src.payload).role;
          auto id = index.find_role(role);
          if (!id) throw IndexError(r.qualified_name + ": unknown role '" + role + "'");
          n.role = *id;
          index.relevant_roles_.insert(*id);
          break;
        }
        default:
          break;
      }
    }
    if (!has_start) throw IndexError(r.qualified_name + ": cfg has no start node");
    for (const auto& e : cfg.edges) {
      auto from = node_by_id.find(e.from);
      auto to = node_by_id.find(e.to);
      if (from == node_by_id.end() || to == node_by_id.end()) {
        throw IndexError(r.qualified_name + ": dangling edge " + e.from + " -> " + e.to);
      }
      CompiledNode& n = r.nodes[from->second];
      if (e.label && *e.label) {
        n.next_true = to->second;
      } else {
        n.next = to->second;
      }
    }
  }

  if (policy != nullptr) {
    for (const auto& rule : policy->rules) {
      index.relevant_roles_ |= index.roles_of(rule.read);
      index.relevant_roles_ |= index.roles_of(rule.write);
    }
  }
  return index;
}

}  // namespace rbacscan
