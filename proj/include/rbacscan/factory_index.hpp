#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rbacscan/model.hpp"
#include "rbacscan/policy.hpp"
#include "rbacscan/role_set.hpp"

namespace rbacscan {

using RoutineId = std::uint32_t;
using EntityId = std::uint32_t;

inline constexpr std::uint32_t kNoNode = UINT32_MAX;

// CFG node with references resolved to dense ids. For cond nodes `next` is
// the false successor and `next_true` the true successor; other nodes use
// `next` only.
struct CompiledNode {
  NodeKind kind = NodeKind::Other;
  std::uint32_t next = kNoNode;
  std::uint32_t next_true = kNoNode;
  RoleId role = 0;
  EntityId entity = 0;
  AccessMode mode = AccessMode::Read;
  RoutineId target = 0;
  const Condition* condition = nullptr;
  const CfgNode* source = nullptr;
};

// A screen or an action.
struct Routine {
  std::string qualified_name;
  std::uint32_t module = 0;
  bool is_screen = false;
  const Entrypoint* screen = nullptr;
  const ActionDef* action = nullptr;
  const Cfg* cfg = nullptr;
  std::vector<CompiledNode> nodes;
  std::uint32_t start = 0;
  RoleSet allowed_roles;  // screens only
};

class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant-time lookups over a validated factory. Holds pointers into the
// factory, which must outlive the index.
class FactoryIndex {
 public:
  const Factory& factory() const { return *factory_; }

  std::optional<RoutineId> find_routine(std::string_view qualified) const;
  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RoleId> find_role(std::string_view name) const;

  std::size_t routine_count() const { return routines_.size(); }
  const Routine& routine(RoutineId id) const { return routines_[id]; }
  const std::vector<Routine>& routines() const { return routines_; }

  std::size_t entity_count() const { return entities_.size(); }
  const Entity& entity(EntityId id) const { return *entities_[id]; }

  std::size_t role_count() const { return role_names_.size(); }
  const std::string& role_name(RoleId id) const { return role_names_[id]; }

  // Unknown names raise IndexError.
  RoleSet roles_of(const std::set<std::string>& names) const;
  std::set<std::string> names_of(const RoleSet& roles) const;

  const RoleSet& default_roles() const { return default_roles_; }
  // Defaults, roles named by grant/revoke/check primitives, policy roles and
  // screen allowed sets. Role states never need any other role.
  const RoleSet& relevant_roles() const { return relevant_roles_; }

 private:
  friend FactoryIndex index_factory(const Factory&, const Policy*);

  const Factory* factory_ = nullptr;
  std::vector<Routine> routines_;
  std::unordered_map<std::string, RoutineId> routine_by_name_;
  std::vector<const Entity*> entities_;
  std::unordered_map<std::string, EntityId> entity_by_name_;
  std::vector<std::string> role_names_;
  std::unordered_map<std::string, RoleId> role_by_name_;
  RoleSet default_roles_;
  RoleSet relevant_roles_;
};

// Throws IndexError when a reference dangles, which only happens if
// validate_factory was skipped.
FactoryIndex index_factory(const Factory& factory, const Policy* policy = nullptr);

}  // namespace rbacscan
