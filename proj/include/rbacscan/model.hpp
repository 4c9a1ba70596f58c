#pragma once

// Application-model IR: a factory of modules, each holding role-restricted
// screens (entrypoints) and actions (subroutines). Every routine carries a
// control-flow graph whose nodes are the primitives the analysis cares about.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rbacscan {

inline constexpr int kFormatVersion = 1;

enum class AccessMode { Read, Write };

std::string_view to_string(AccessMode mode);
std::optional<AccessMode> parse_access_mode(std::string_view text);

// Boolean guard over role checks on the current user and uninterpreted atoms.
struct Condition {
  enum class Op { CheckRole, Opaque, Not, And, Or };

  Op op = Op::Opaque;
  // Role name for CheckRole, label for Opaque; unused otherwise.
  std::string name;
  std::vector<Condition> args;

  static Condition check_role(std::string role);
  static Condition opaque(std::string id);
  static Condition negate(Condition arg);
  static Condition all_of(std::vector<Condition> args);
  static Condition any_of(std::vector<Condition> args);

  bool operator==(const Condition&) const = default;
};

struct ConditionAtoms {
  std::set<std::string> roles;
  std::set<std::string> opaque_ids;

  bool operator==(const ConditionAtoms&) const = default;
};

ConditionAtoms condition_atoms(const Condition& cond);

struct StartNode {
  bool operator==(const StartNode&) const = default;
};
struct EndNode {
  bool operator==(const EndNode&) const = default;
};
struct OtherNode {
  bool operator==(const OtherNode&) const = default;
};
struct CondNode {
  Condition condition;
  bool operator==(const CondNode&) const = default;
};
struct CallNode {
  std::string target;  // "Module.Action"
  bool operator==(const CallNode&) const = default;
};
struct AccessNode {
  std::string entity;
  AccessMode mode = AccessMode::Read;
  bool operator==(const AccessNode&) const = default;
};
struct GrantNode {
  std::string role;
  bool operator==(const GrantNode&) const = default;
};
struct RevokeNode {
  std::string role;
  bool operator==(const RevokeNode&) const = default;
};

// Alternative order matches NodeKind.
using NodePayload =
    std::variant<StartNode, EndNode, OtherNode, CondNode, CallNode, AccessNode, GrantNode, RevokeNode>;

enum class NodeKind { Start, End, Other, Cond, Call, Access, Grant, Revoke };

std::string_view to_string(NodeKind kind);

struct CfgNode {
  std::string id;
  NodePayload payload;

  NodeKind kind() const { return static_cast<NodeKind>(payload.index()); }
  bool operator==(const CfgNode&) const = default;
};

struct CfgEdge {
  std::string from;
  std::string to;
  // Set only on out-edges of cond nodes.
  std::optional<bool> label;

  bool operator==(const CfgEdge&) const = default;
};

struct Cfg {
  std::vector<CfgNode> nodes;
  std::vector<CfgEdge> edges;

  bool operator==(const Cfg&) const = default;
};

struct Entrypoint {
  std::string name;
  std::set<std::string> allowed_roles;
  Cfg cfg;

  bool operator==(const Entrypoint&) const = default;
};

struct ActionDef {
  std::string name;
  Cfg cfg;

  bool operator==(const ActionDef&) const = default;
};

struct ModuleDef {
  std::string name;
  std::vector<Entrypoint> screens;
  std::vector<ActionDef> actions;

  bool operator==(const ModuleDef&) const = default;
};

struct Entity {
  std::string name;
  std::string module;

  bool operator==(const Entity&) const = default;
};

struct Factory {
  int format_version = kFormatVersion;
  std::string name;
  std::set<std::string> roles;
  std::set<std::string> default_roles;
  std::vector<Entity> entities;
  std::vector<ModuleDef> modules;

  bool operator==(const Factory&) const = default;
};

std::string qualified_name(std::string_view module, std::string_view routine);

// A broken invariant. `location` is a dotted path such as
// "modules.UI.screens.Home.cfg.nodes.n3".
struct Violation {
  std::string location;
  std::string message;

  bool operator==(const Violation&) const = default;
};

bool is_identifier(std::string_view name);

// Returns every structural or referential problem; empty iff the factory is
// well formed.
std::vector<Violation> validate_factory(const Factory& factory);

// Per-routine checks, exposed for tests and tools that build CFGs by hand.
// `location` prefixes each violation path.
std::vector<Violation> validate_cfg(const Cfg& cfg, const Factory& factory, const std::string& location);

}  // namespace rbacscan
