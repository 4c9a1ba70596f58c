#include "rbacscan/ingest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace rbacscan {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "syntax error";
    case ParseError::Kind::Schema: return "schema error";
    case ParseError::Kind::Semantic: return "semantic error";
  }
  return "error";
}

namespace {

constexpr int kMaxConditionDepth = 256;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ParseError(ParseError::Kind::Schema, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(ParseError::Kind::Syntax, "line " + std::to_string(line) + ", column " +
                                                   std::to_string(col) + " (byte " + std::to_string(e.byte) +
                                                   "): " + e.what());
  }
}

// Object reader that rejects missing, mistyped and unknown fields.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schema_error(path_, "expected an object");
  }

  const json& required(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) schema_error(path_, std::string("missing field '") + key + "'");
    seen_.insert(key);
    return *it;
  }

  const json* optional(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::string string(const char* key) {
    const json& v = required(key);
    if (!v.is_string()) schema_error(sub(key), "expected a string");
    return v.get<std::string>();
  }

  const json& array(const char* key) {
    const json& v = required(key);
    if (!v.is_array()) schema_error(sub(key), "expected an array");
    return v;
  }

  std::set<std::string> string_set(const char* key) {
    const json& v = array(key);
    std::set<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = sub(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_string()) schema_error(p, "expected a string");
      if (!out.insert(v[i].get<std::string>()).second) schema_error(p, "duplicate set element");
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) schema_error(path_, "unknown field '" + it.key() + "'");
    }
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::unordered_set<std::string> seen_;
};

int read_format_version(Fields& f) {
  const json& v = f.required("format_version");
  if (!v.is_number_integer()) schema_error("format_version", "expected an integer");
  const auto version = v.get<std::int64_t>();
  if (version != kFormatVersion) {
    schema_error("format_version", "unsupported format version " + std::to_string(version));
  }
  return kFormatVersion;
}

Condition read_condition(const json& j, const std::string& path, int depth) {
  if (depth > kMaxConditionDepth) schema_error(path, "condition nesting too deep");
  Fields f(j, path);
  const std::string op = f.string("op");
  Condition c;
  if (op == "check_role") {
    c = Condition::check_role(f.string("role"));
  } else if (op == "opaque") {
    c = Condition::opaque(f.string("id"));
  } else if (op == "not") {
    c = Condition::negate(read_condition(f.required("arg"), f.sub("arg"), depth + 1));
  } else if (op == "and" || op == "or") {
    const json& args = f.array("args");
    std::vector<Condition> parsed;
    for (std::size_t i = 0; i < args.size(); ++i) {
      parsed.push_back(read_condition(args[i], f.sub("args") + "[" + std::to_string(i) + "]", depth + 1));
    }
    if (parsed.size() < 2) schema_error(f.sub("args"), "needs at least two operands");
    c = op == "and" ? Condition::all_of(std::move(parsed)) : Condition::any_of(std::move(parsed));
  } else {
    schema_error(f.sub("op"), "unknown condition operator '" + op + "'");
  }
  f.finish();
  return c;
}

CfgNode read_node(const json& j, const std::string& path) {
  Fields f(j, path);
  CfgNode n;
  n.id = f.string("id");
  const std::string kind = f.string("kind");
  if (kind == "start") {
    n.payload = StartNode{};
  } else if (kind == "end") {
    n.payload = EndNode{};
  } else if (kind == "other") {
    n.payload = OtherNode{};
  } else if (kind == "cond") {
    n.payload = CondNode{read_condition(f.required("condition"), f.sub("condition"), 0)};
  } else if (kind == "call") {
    n.payload = CallNode{f.string("target")};
  } else if (kind == "access") {
    AccessNode a;
    a.entity = f.string("entity");
    const std::string mode = f.string("mode");
    auto m = parse_access_mode(mode);
    if (!m) schema_error(f.sub("mode"), "expected \"read\" or \"write\"");
    a.mode = *m;
    n.payload = std::move(a);
  } else if (kind == "grant") {
    n.payload = GrantNode{f.string("role")};
  } else if (kind == "revoke") {
    n.payload = RevokeNode{f.string("role")};
  } else {
    schema_error(f.sub("kind"), "unknown node kind '" + kind + "'");
  }
  f.finish();
  return n;
}

Cfg read_cfg(const json& j, const std::string& path) {
  Fields f(j, path);
  Cfg cfg;
  const json& nodes = f.array("nodes");
  cfg.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    cfg.nodes.push_back(read_node(nodes[i], f.sub("nodes") + "[" + std::to_string(i) + "]"));
  }
  const json& edges = f.array("edges");
  cfg.edges.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = f.sub("edges") + "[" + std::to_string(i) + "]";
    Fields ef(edges[i], p);
    CfgEdge e;
    e.from = ef.string("from");
    e.to = ef.string("to");
    if (const json* label = ef.optional("label")) {
      if (!label->is_string()) schema_error(ef.sub("label"), "expected \"true\" or \"false\"");
      const auto& s = label->get_ref<const std::string&>();
      if (s == "true") {
        e.label = true;
      } else if (s == "false") {
        e.label = false;
      } else {
        schema_error(ef.sub("label"), "expected \"true\" or \"false\"");
      }
    }
    ef.finish();
    cfg.edges.push_back(std::move(e));
  }
  f.finish();
  return cfg;
}

ordered_json write_condition(const Condition& c) {
  ordered_json j;
  switch (c.op) {
    case Condition::Op::CheckRole:
      j["op"] = "check_role";
      j["role"] = c.name;
      break;
    case Condition::Op::Opaque:
      j["op"] = "opaque";
      j["id"] = c.name;
      break;
    case Condition::Op::Not:
      j["op"] = "not";
      j["arg"] = write_condition(c.args.at(0));
      break;
    case Condition::Op::And:
    case Condition::Op::Or: {
      j["op"] = c.op == Condition::Op::And ? "and" : "or";
      ordered_json args = ordered_json::array();
      for (const auto& a : c.args) args.push_back(write_condition(a));
      j["args"] = std::move(args);
      break;
    }
  }
  return j;
}

ordered_json write_cfg(const Cfg& cfg) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : cfg.nodes) {
    ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = std::string(to_string(n.kind()));
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CondNode>) {
            jn["condition"] = write_condition(p.condition);
          } else if constexpr (std::is_same_v<T, CallNode>) {
            jn["target"] = p.target;
          } else if constexpr (std::is_same_v<T, AccessNode>) {
            jn["entity"] = p.entity;
            jn["mode"] = std::string(to_string(p.mode));
          } else if constexpr (std::is_same_v<T, GrantNode> || std::is_same_v<T, RevokeNode>) {
            jn["role"] = p.role;
          }
        },
        n.payload);
    nodes.push_back(std::move(jn));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& e : cfg.edges) {
    ordered_json je;
    je["from"] = e.from;
    je["to"] = e.to;
    if (e.label) je["label"] = *e.label ? "true" : "false";
    edges.push_back(std::move(je));
  }
  ordered_json j;
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

ordered_json string_array(const std::set<std::string>& s) {
  ordered_json a = ordered_json::array();
  for (const auto& v : s) a.push_back(v);
  return a;
}

}  // namespace

Factory parse_factory(std::string_view text) {
  const json root = parse_json(text);
  Fields f(root, "");
  Factory factory;
  factory.format_version = read_format_version(f);
  factory.name = f.string("name");
  factory.roles = f.string_set("roles");
  factory.default_roles = f.string_set("default_roles");

  const json& entities = f.array("entities");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    Fields ef(entities[i], "entities[" + std::to_string(i) + "]");
    factory.entities.push_back({ef.string("name"), ef.string("module")});
    ef.finish();
  }

  const json& modules = f.array("modules");
  factory.modules.reserve(modules.size());
  for (std::size_t mi = 0; mi < modules.size(); ++mi) {
    Fields mf(modules[mi], "modules[" + std::to_string(mi) + "]");
    ModuleDef m;
    m.name = mf.string("name");
    const json& screens = mf.array("screens");
    for (std::size_t si = 0; si < screens.size(); ++si) {
      Fields sf(screens[si], mf.sub("screens") + "[" + std::to_string(si) + "]");
      Entrypoint s;
      s.name = sf.string("name");
      s.allowed_roles = sf.string_set("allowed_roles");
      s.cfg = read_cfg(sf.required("cfg"), sf.sub("cfg"));
      sf.finish();
      m.screens.push_back(std::move(s));
    }
    const json& actions = mf.array("actions");
    for (std::size_t ai = 0; ai < actions.size(); ++ai) {
      Fields af(actions[ai], mf.sub("actions") + "[" + std::to_string(ai) + "]");
      ActionDef a;
      a.name = af.string("name");
      a.cfg = read_cfg(af.required("cfg"), af.sub("cfg"));
      af.finish();
      m.actions.push_back(std::move(a));
    }
    mf.finish();
    factory.modules.push_back(std::move(m));
  }
  f.finish();

  auto violations = validate_factory(factory);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " validation violation(s); first: " +
                      violations.front().location + ": " + violations.front().message;
    throw ParseError(ParseError::Kind::Semantic, msg, std::move(violations));
  }
  return factory;
}

Policy parse_policy(std::string_view text, const Factory& factory) {
  const json root = parse_json(text);
  Fields f(root, "");
  read_format_version(f);
  Policy policy;
  const json& rules = f.array("rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    Fields rf(rules[i], "rules[" + std::to_string(i) + "]");
    PolicyRule rule;
    rule.entity = rf.string("entity");
    rule.read = rf.string_set("read");
    rule.write = rf.string_set("write");
    rf.finish();
    policy.rules.push_back(std::move(rule));
  }
  f.finish();

  auto violations = validate_policy(policy, factory);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " policy violation(s); first: " +
                      violations.front().location + ": " + violations.front().message;
    throw ParseError(ParseError::Kind::Semantic, msg, std::move(violations));
  }
  return policy;
}

std::string serialize_factory(const Factory& factory) {
  ordered_json j;
  j["format_version"] = factory.format_version;
  j["name"] = factory.name;
  j["roles"] = string_array(factory.roles);
  j["default_roles"] = string_array(factory.default_roles);
  ordered_json entities = ordered_json::array();
  for (const auto& e : factory.entities) {
    ordered_json je;
    je["name"] = e.name;
    je["module"] = e.module;
    entities.push_back(std::move(je));
  }
  j["entities"] = std::move(entities);
  ordered_json modules = ordered_json::array();
  for (const auto& m : factory.modules) {
    ordered_json jm;
    jm["name"] = m.name;
    ordered_json screens = ordered_json::array();
    for (const auto& s : m.screens) {
      ordered_json js;
      js["name"] = s.name;
      js["allowed_roles"] = string_array(s.allowed_roles);
      js["cfg"] = write_cfg(s.cfg);
      screens.push_back(std::move(js));
    }
    jm["screens"] = std::move(screens);
    ordered_json actions = ordered_json::array();
    for (const auto& a : m.actions) {
      ordered_json ja;
      ja["name"] = a.name;
      ja["cfg"] = write_cfg(a.cfg);
      actions.push_back(std::move(ja));
    }
    jm["actions"] = std::move(actions);
    modules.push_back(std::move(jm));
  }
  j["modules"] = std::move(modules);
  return j.dump(2) + "\n";
}

std::string serialize_policy(const Policy& policy) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  ordered_json rules = ordered_json::array();
  for (const auto& r : policy.rules) {
    ordered_json jr;
    jr["entity"] = r.entity;
    jr["read"] = string_array(r.read);
    jr["write"] = string_array(r.write);
    rules.push_back(std::move(jr));
  }
  j["rules"] = std::move(rules);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace rbacscan
