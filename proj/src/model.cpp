#include "rbacscan/model.hpp"

#include <map>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "rbacscan/policy.hpp"

namespace rbacscan {

std::string_view to_string(AccessMode mode) { return mode == AccessMode::Read ? "read" : "write"; }

std::optional<AccessMode> parse_access_mode(std::string_view text) {
  if (text == "read") return AccessMode::Read;
  if (text == "write") return AccessMode::Write;
  return std::nullopt;
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Start: return "start";
    case NodeKind::End: return "end";
    case NodeKind::Other: return "other";
    case NodeKind::Cond: return "cond";
    case NodeKind::Call: return "call";
    case NodeKind::Access: return "access";
    case NodeKind::Grant: return "grant";
    case NodeKind::Revoke: return "revoke";
  }
  return "?";
}

Condition Condition::check_role(std::string role) {
  Condition c;
  c.op = Op::CheckRole;
  c.name = std::move(role);
  return c;
}

Condition Condition::opaque(std::string id) {
  Condition c;
  c.op = Op::Opaque;
  c.name = std::move(id);
  return c;
}

Condition Condition::negate(Condition arg) {
  Condition c;
  c.op = Op::Not;
  c.args.push_back(std::move(arg));
  return c;
}

Condition Condition::all_of(std::vector<Condition> args) {
  Condition c;
  c.op = Op::And;
  c.args = std::move(args);
  return c;
}

Condition Condition::any_of(std::vector<Condition> args) {
  Condition c;
  c.op = Op::Or;
  c.args = std::move(args);
  return c;
}

namespace {

void collect_atoms(const Condition& cond, ConditionAtoms& out) {
  switch (cond.op) {
    case Condition::Op::CheckRole: out.roles.insert(cond.name); break;
    case Condition::Op::Opaque: out.opaque_ids.insert(cond.name); break;
    default:
      for (const auto& arg : cond.args) collect_atoms(arg, out);
  }
}

}  // namespace

ConditionAtoms condition_atoms(const Condition& cond) {
  ConditionAtoms atoms;
  collect_atoms(cond, atoms);
  return atoms;
}

std::string qualified_name(std::string_view module, std::string_view routine) {
  std::string out;
  out.reserve(module.size() + routine.size() + 1);
  out.append(module).append(".").append(routine);
  return out;
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

namespace {

class Validator {
 public:
  explicit Validator(const Factory& factory) : factory_(factory) {
    for (const auto& e : factory.entities) entity_names_.insert(e.name);
    for (const auto& m : factory.modules) {
      for (const auto& s : m.screens) screens_.insert(qualified_name(m.name, s.name));
      for (const auto& a : m.actions) actions_.insert(qualified_name(m.name, a.name));
    }
  }

  std::vector<Violation> run() {
    if (factory_.format_version != kFormatVersion) {
      add("format_version", "unsupported format version " + std::to_string(factory_.format_version));
    }
    for (const auto& role : factory_.roles) {
      if (!is_identifier(role)) add("roles." + role, "role name is not an identifier");
    }
    for (const auto& role : factory_.default_roles) {
      if (!factory_.roles.contains(role)) add("default_roles." + role, "default role is not declared in roles");
    }
    check_entities();
    check_modules();
    return take();
  }

  std::vector<Violation> take() { return std::move(out_); }

  void check_cfg(const Cfg& cfg, const std::string& loc) {
    std::unordered_map<std::string, const CfgNode*> by_id;
    std::size_t starts = 0;
    std::size_t ends = 0;
    for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
      const auto& node = cfg.nodes[i];
      if (node.id.empty()) {
        add(loc + ".nodes[" + std::to_string(i) + "]", "node id is empty");
        continue;
      }
      if (!by_id.emplace(node.id, &node).second) {
        add(loc + ".nodes." + node.id, "duplicate node id");
        continue;
      }
      if (node.kind() == NodeKind::Start) ++starts;
      if (node.kind() == NodeKind::End) ++ends;
      check_node(node, loc + ".nodes." + node.id);
    }
    if (starts != 1) add(loc, "expected exactly one start node, found " + std::to_string(starts));
    if (ends == 0) add(loc, "expected at least one end node");

    struct OutEdges {
      std::size_t unlabeled = 0;
      std::size_t true_edges = 0;
      std::size_t false_edges = 0;
    };
    std::map<std::string, OutEdges> out;
    for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
      const auto& edge = cfg.edges[i];
      const std::string eloc = loc + ".edges[" + std::to_string(i) + "]";
      auto from = by_id.find(edge.from);
      if (from == by_id.end()) {
        add(eloc, "edge source '" + edge.from + "' does not exist");
        continue;
      }
      if (!by_id.contains(edge.to)) add(eloc, "edge target '" + edge.to + "' does not exist");
      if (edge.label && from->second->kind() != NodeKind::Cond) {
        add(eloc, "labeled edge leaves non-cond node '" + edge.from + "'");
      }
      auto& counts = out[edge.from];
      if (!edge.label) {
        ++counts.unlabeled;
      } else if (*edge.label) {
        ++counts.true_edges;
      } else {
        ++counts.false_edges;
      }
    }

    for (const auto& node : cfg.nodes) {
      if (node.id.empty() || by_id.at(node.id) != &node) continue;
      const OutEdges counts = out.contains(node.id) ? out[node.id] : OutEdges{};
      const std::string nloc = loc + ".nodes." + node.id;
      switch (node.kind()) {
        case NodeKind::Cond:
          if (counts.true_edges != 1 || counts.false_edges != 1 || counts.unlabeled != 0) {
            add(nloc, "cond node needs exactly one true and one false out-edge (has " +
                          std::to_string(counts.true_edges) + " true, " + std::to_string(counts.false_edges) +
                          " false, " + std::to_string(counts.unlabeled) + " unlabeled)");
          }
          break;
        case NodeKind::End:
          if (counts.unlabeled + counts.true_edges + counts.false_edges != 0) {
            add(nloc, "end node has out-edges");
          }
          break;
        default:
          if (counts.unlabeled != 1) {
            add(nloc, "node needs exactly one unlabeled out-edge (has " + std::to_string(counts.unlabeled) + ")");
          }
      }
    }
  }

 private:
  void add(std::string location, std::string message) {
    out_.push_back({std::move(location), std::move(message)});
  }

  void check_entities() {
    std::unordered_set<std::string> module_names;
    for (const auto& m : factory_.modules) module_names.insert(m.name);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < factory_.entities.size(); ++i) {
      const auto& e = factory_.entities[i];
      if (e.name.empty()) {
        add("entities[" + std::to_string(i) + "]", "entity name is empty");
        continue;
      }
      const std::string loc = "entities." + e.name;
      if (!seen.insert(e.name).second) add(loc, "duplicate entity name");
      if (!module_names.contains(e.module)) add(loc, "owning module '" + e.module + "' does not exist");
    }
  }

  void check_modules() {
    std::unordered_set<std::string> seen;
    for (std::size_t mi = 0; mi < factory_.modules.size(); ++mi) {
      const auto& m = factory_.modules[mi];
      if (m.name.empty() || m.name.find('.') != std::string::npos) {
        add("modules[" + std::to_string(mi) + "]", "module name must be non-empty and contain no '.'");
        continue;
      }
      const std::string mloc = "modules." + m.name;
      if (!seen.insert(m.name).second) {
        add(mloc, "duplicate module name");
        continue;
      }
      std::unordered_set<std::string> routine_names;
      auto check_name = [&](const std::string& name, const std::string& loc) {
        if (name.empty() || name.find('.') != std::string::npos) {
          add(loc, "routine name must be non-empty and contain no '.'");
          return false;
        }
        if (!routine_names.insert(name).second) {
          add(loc, "duplicate screen or action name in module");
          return false;
        }
        return true;
      };
      for (std::size_t si = 0; si < m.screens.size(); ++si) {
        const auto& s = m.screens[si];
        const std::string sloc = mloc + ".screens." + (s.name.empty() ? "[" + std::to_string(si) + "]" : s.name);
        if (!check_name(s.name, sloc)) continue;
        if (s.allowed_roles.empty()) add(sloc + ".allowed_roles", "screen must allow at least one role");
        for (const auto& r : s.allowed_roles) {
          if (!factory_.roles.contains(r)) add(sloc + ".allowed_roles." + r, "unknown role '" + r + "'");
        }
        check_cfg(s.cfg, sloc + ".cfg");
      }
      for (std::size_t ai = 0; ai < m.actions.size(); ++ai) {
        const auto& a = m.actions[ai];
        const std::string aloc = mloc + ".actions." + (a.name.empty() ? "[" + std::to_string(ai) + "]" : a.name);
        if (!check_name(a.name, aloc)) continue;
        check_cfg(a.cfg, aloc + ".cfg");
      }
    }
  }

  void check_condition(const Condition& cond, const std::string& loc, int depth) {
    if (depth > kMaxConditionDepth) {
      add(loc, "condition nesting too deep");
      return;
    }
    switch (cond.op) {
      case Condition::Op::CheckRole:
        if (!factory_.roles.contains(cond.name)) add(loc, "unknown role '" + cond.name + "' in check_role");
        break;
      case Condition::Op::Opaque:
        if (cond.name.empty()) add(loc, "opaque condition needs an id");
        break;
      case Condition::Op::Not:
        if (cond.args.size() != 1) add(loc, "not takes exactly one argument");
        break;
      case Condition::Op::And:
      case Condition::Op::Or:
        if (cond.args.size() < 2) add(loc, "and/or take at least two arguments");
        break;
    }
    for (const auto& arg : cond.args) check_condition(arg, loc, depth + 1);
  }

  void check_node(const CfgNode& node, const std::string& loc) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CondNode>) {
            check_condition(p.condition, loc, 0);
          } else if constexpr (std::is_same_v<T, CallNode>) {
            if (!actions_.contains(p.target)) {
              add(loc, screens_.contains(p.target) ? "call target '" + p.target + "' is a screen, not an action"
                                                   : "unknown call target '" + p.target + "'");
            }
          } else if constexpr (std::is_same_v<T, AccessNode>) {
            if (!entity_names_.contains(p.entity)) add(loc, "unknown entity '" + p.entity + "'");
          } else if constexpr (std::is_same_v<T, GrantNode> || std::is_same_v<T, RevokeNode>) {
            if (!factory_.roles.contains(p.role)) add(loc, "unknown role '" + p.role + "'");
          }
        },
        node.payload);
  }

  static constexpr int kMaxConditionDepth = 256;

  const Factory& factory_;
  std::unordered_set<std::string> entity_names_;
  std::unordered_set<std::string> screens_;
  std::unordered_set<std::string> actions_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_factory(const Factory& factory) { return Validator(factory).run(); }

std::vector<Violation> validate_cfg(const Cfg& cfg, const Factory& factory, const std::string& location) {
  Validator v(factory);
  v.check_cfg(cfg, location);
  return v.take();
}

const PolicyRule* Policy::find(std::string_view entity) const {
  for (const auto& r : rules) {
    if (r.entity == entity) return &r;
  }
  return nullptr;
}

std::vector<Violation> validate_policy(const Policy& policy, const Factory& factory) {
  std::vector<Violation> out;
  std::unordered_set<std::string> entities;
  for (const auto& e : factory.entities) entities.insert(e.name);
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    const auto& rule = policy.rules[i];
    const std::string loc = "rules." + (rule.entity.empty() ? "[" + std::to_string(i) + "]" : rule.entity);
    if (!entities.contains(rule.entity)) out.push_back({loc, "unknown entity '" + rule.entity + "'"});
    if (!seen.insert(rule.entity).second) out.push_back({loc, "duplicate rule for entity"});
    for (AccessMode mode : {AccessMode::Read, AccessMode::Write}) {
      const auto& roles = rule.roles_for(mode);
      const std::string mloc = loc + "." + std::string(to_string(mode));
      if (roles.empty()) out.push_back({mloc, "role set must not be empty"});
      for (const auto& r : roles) {
        if (!factory.roles.contains(r)) out.push_back({mloc + "." + r, "unknown role '" + r + "'"});
      }
    }
  }
  return out;
}

}  // namespace rbacscan
