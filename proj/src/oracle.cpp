#include "rbacscan/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_set>
#include <vector>

namespace rbacscan::oracle {

namespace {

using Roles = std::set<std::string>;

struct Routine {
  std::string name;
  const Cfg* cfg = nullptr;
  std::map<std::string, std::size_t> index_of;
  // successor per node: [unlabeled/false, true]
  std::vector<std::size_t> next;
  std::vector<std::size_t> next_true;
  std::size_t start = 0;
};

bool evaluate(const Condition& c, const std::map<std::string, bool>& roles, const std::map<std::string, bool>& opaque) {
  switch (c.op) {
    case Condition::Op::CheckRole: return roles.at(c.name);
    case Condition::Op::Opaque: return opaque.at(c.name);
    case Condition::Op::Not: return !evaluate(c.args.at(0), roles, opaque);
    case Condition::Op::And:
      return std::all_of(c.args.begin(), c.args.end(), [&](const auto& a) { return evaluate(a, roles, opaque); });
    case Condition::Op::Or:
      return std::any_of(c.args.begin(), c.args.end(), [&](const auto& a) { return evaluate(a, roles, opaque); });
  }
  return false;
}

void atoms(const Condition& c, Roles& roles, Roles& opaque) {
  if (c.op == Condition::Op::CheckRole) roles.insert(c.name);
  if (c.op == Condition::Op::Opaque) opaque.insert(c.name);
  for (const auto& a : c.args) atoms(a, roles, opaque);
}

struct Entailment {
  bool satisfiable = true;
  Roles must_hold;
  Roles must_lack;
};

// Walks every assignment and keeps the roles that agree across all models.
Entailment entail(const Condition& c, bool branch, int max_atoms) {
  Roles roles;
  Roles opaque;
  atoms(c, roles, opaque);
  const std::vector<std::string> rv(roles.begin(), roles.end());
  const std::vector<std::string> ov(opaque.begin(), opaque.end());
  const std::size_t n = rv.size() + ov.size();
  if (static_cast<int>(n) > max_atoms) return {};

  Entailment out;
  out.satisfiable = false;
  std::vector<std::vector<bool>> models;
  std::vector<bool> bits(n, false);
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == n) {
      std::map<std::string, bool> rmap;
      std::map<std::string, bool> omap;
      for (std::size_t k = 0; k < rv.size(); ++k) rmap[rv[k]] = bits[k];
      for (std::size_t k = 0; k < ov.size(); ++k) omap[ov[k]] = bits[rv.size() + k];
      if (evaluate(c, rmap, omap) == branch) models.push_back(bits);
      return;
    }
    bits[i] = false;
    walk(i + 1);
    bits[i] = true;
    walk(i + 1);
  };
  walk(0);
  if (models.empty()) return out;
  out.satisfiable = true;
  for (std::size_t k = 0; k < rv.size(); ++k) {
    bool all_true = true;
    bool all_false = true;
    for (const auto& m : models) {
      all_true = all_true && m[k];
      all_false = all_false && !m[k];
    }
    if (all_true) out.must_hold.insert(rv[k]);
    if (all_false) out.must_lack.insert(rv[k]);
  }
  return out;
}

bool intersects(const Roles& a, const Roles& b) {
  return std::any_of(a.begin(), a.end(), [&](const auto& r) { return b.contains(r); });
}

class Explorer {
 public:
  Explorer(const Factory& factory, const Policy& policy, const std::string& entity, AccessMode mode, int max_atoms,
           const OracleBounds& bounds)
      : entity_(entity), mode_(mode), max_atoms_(max_atoms), bounds_(bounds) {
    for (const auto& m : factory.modules) {
      for (const auto& s : m.screens) add_routine(m.name + "." + s.name, s.cfg);
      for (const auto& a : m.actions) add_routine(m.name + "." + a.name, a.cfg);
    }
    const PolicyRule* rule = policy.find(entity);
    if (rule == nullptr) throw std::invalid_argument("no policy rule for entity " + entity);
    allowed_ = rule->roles_for(mode);

    relevant_ = factory.default_roles;
    for (const auto& r : policy.rules) {
      relevant_.insert(r.read.begin(), r.read.end());
      relevant_.insert(r.write.begin(), r.write.end());
    }
    for (const auto& m : factory.modules) {
      for (const auto& s : m.screens) {
        relevant_.insert(s.allowed_roles.begin(), s.allowed_roles.end());
        scan_roles(s.cfg);
      }
      for (const auto& a : m.actions) scan_roles(a.cfg);
    }
    if (relevant_.size() > bounds_.max_relevant_roles) {
      throw InstanceTooLarge(std::to_string(relevant_.size()) + " relevant roles");
    }
  }

  std::set<OracleTuple> run(const Factory& factory, const std::string& entrypoint) {
    const Entrypoint* screen = nullptr;
    for (const auto& m : factory.modules) {
      for (const auto& s : m.screens) {
        if (m.name + "." + s.name == entrypoint) screen = &s;
      }
    }
    if (screen == nullptr) throw std::invalid_argument("unknown entrypoint " + entrypoint);

    std::size_t inlined = 0;
    std::vector<std::string> stack;
    check_size(entrypoint, stack, inlined);

    Roles may;
    for (const auto& r : screen->allowed_roles) {
      if (relevant_.contains(r)) may.insert(r);
    }
    for (const auto& r : factory.default_roles) {
      if (relevant_.contains(r)) may.insert(r);
    }
    std::vector<std::pair<const Routine*, std::size_t>> frames{{&routines_.at(entrypoint), 0}};
    frames.back().second = frames.back().first->start;
    explore(frames, Roles{}, may);

    std::set<OracleTuple> out;
    for (const auto& [where, sets] : flaws_) {
      for (const auto& v : sets) {
        const bool dominated = std::any_of(sets.begin(), sets.end(), [&](const Roles& other) {
          return other != v && std::includes(other.begin(), other.end(), v.begin(), v.end());
        });
        if (!dominated) out.insert({entrypoint, entity_, mode_, v});
      }
    }
    return out;
  }

 private:
  void add_routine(const std::string& name, const Cfg& cfg) {
    Routine r;
    r.name = name;
    r.cfg = &cfg;
    for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
      r.index_of[cfg.nodes[i].id] = i;
      if (cfg.nodes[i].kind() == NodeKind::Start) r.start = i;
    }
    r.next.assign(cfg.nodes.size(), SIZE_MAX);
    r.next_true.assign(cfg.nodes.size(), SIZE_MAX);
    for (const auto& e : cfg.edges) {
      const std::size_t from = r.index_of.at(e.from);
      const std::size_t to = r.index_of.at(e.to);
      if (e.label && *e.label) {
        r.next_true[from] = to;
      } else {
        r.next[from] = to;
      }
    }
    routines_.emplace(name, std::move(r));
  }

  void scan_roles(const Cfg& cfg) {
    for (const auto& n : cfg.nodes) {
      if (const auto* g = std::get_if<GrantNode>(&n.payload)) relevant_.insert(g->role);
      if (const auto* r = std::get_if<RevokeNode>(&n.payload)) relevant_.insert(r->role);
      if (const auto* c = std::get_if<CondNode>(&n.payload)) {
        Roles roles;
        Roles opaque;
        atoms(c->condition, roles, opaque);
        relevant_.insert(roles.begin(), roles.end());
      }
    }
  }

  void check_size(const std::string& routine, std::vector<std::string>& stack, std::size_t& inlined) {
    if (std::find(stack.begin(), stack.end(), routine) != stack.end()) {
      throw InstanceTooLarge("recursive call to " + routine);
    }
    if (stack.size() + 1 > bounds_.max_call_depth + 1) throw InstanceTooLarge("call depth exceeds bound");
    const Routine& r = routines_.at(routine);
    inlined += r.cfg->nodes.size();
    if (inlined > bounds_.max_inlined_nodes) throw InstanceTooLarge("inlined CFG exceeds bound");
    stack.push_back(routine);
    for (const auto& n : r.cfg->nodes) {
      if (const auto* c = std::get_if<CallNode>(&n.payload)) check_size(c->target, stack, inlined);
    }
    stack.pop_back();
  }

  std::string key(const std::vector<std::pair<const Routine*, std::size_t>>& frames, const Roles& has,
                  const Roles& may) const {
    std::string k;
    for (const auto& [r, n] : frames) k += r->name + "#" + std::to_string(n) + "/";
    k += "|";
    for (const auto& s : has) k += s + ",";
    k += "|";
    for (const auto& s : may) k += s + ",";
    return k;
  }

  void explore(std::vector<std::pair<const Routine*, std::size_t>> frames, Roles has, Roles may) {
    const std::string k = key(frames, has, may);
    if (on_path_.contains(k)) return;
    on_path_.insert(k);

    auto& [routine, at] = frames.back();
    const CfgNode& node = routine->cfg->nodes[at];
    auto step = [&](std::size_t to, Roles h, Roles m) {
      auto next = frames;
      next.back().second = to;
      explore(std::move(next), std::move(h), std::move(m));
    };

    switch (node.kind()) {
      case NodeKind::Access: {
        const auto& acc = std::get<AccessNode>(node.payload);
        if (acc.entity == entity_ && acc.mode == mode_ && !intersects(has, allowed_)) {
          Roles violating;
          std::set_difference(may.begin(), may.end(), allowed_.begin(), allowed_.end(),
                              std::inserter(violating, violating.end()));
          if (!violating.empty()) flaws_[routine->name + "#" + node.id].insert(violating);
        }
        step(routine->next[at], has, may);
        break;
      }
      case NodeKind::Start:
      case NodeKind::Other:
        step(routine->next[at], has, may);
        break;
      case NodeKind::Grant: {
        const auto& role = std::get<GrantNode>(node.payload).role;
        if (relevant_.contains(role)) {
          has.insert(role);
          may.insert(role);
        }
        step(routine->next[at], has, may);
        break;
      }
      case NodeKind::Revoke: {
        const auto& role = std::get<RevokeNode>(node.payload).role;
        has.erase(role);
        may.erase(role);
        step(routine->next[at], has, may);
        break;
      }
      case NodeKind::Cond: {
        const auto& cond = std::get<CondNode>(node.payload).condition;
        for (bool branch : {true, false}) {
          const Entailment e = entail(cond, branch, max_atoms_);
          if (!e.satisfiable) continue;
          if (!std::includes(may.begin(), may.end(), e.must_hold.begin(), e.must_hold.end())) continue;
          if (intersects(e.must_lack, has)) continue;
          Roles h = has;
          h.insert(e.must_hold.begin(), e.must_hold.end());
          Roles m;
          std::set_difference(may.begin(), may.end(), e.must_lack.begin(), e.must_lack.end(),
                              std::inserter(m, m.end()));
          step(branch ? routine->next_true[at] : routine->next[at], std::move(h), std::move(m));
        }
        break;
      }
      case NodeKind::Call: {
        const Routine& callee = routines_.at(std::get<CallNode>(node.payload).target);
        auto next = frames;
        next.emplace_back(&callee, callee.start);
        explore(std::move(next), has, may);
        break;
      }
      case NodeKind::End:
        if (frames.size() > 1) {
          auto next = frames;
          next.pop_back();
          auto& caller = next.back();
          caller.second = caller.first->next[caller.second];
          explore(std::move(next), has, may);
        }
        break;
    }
    on_path_.erase(k);
  }

  std::map<std::string, Routine> routines_;
  std::string entity_;
  AccessMode mode_;
  int max_atoms_;
  OracleBounds bounds_;
  Roles allowed_;
  Roles relevant_;
  std::unordered_set<std::string> on_path_;
  std::map<std::string, std::set<Roles>> flaws_;
};

}  // namespace

std::set<OracleTuple> oracle_analyze(const Factory& factory, const std::string& entrypoint,
                                     const std::string& entity, AccessMode mode, const Policy& policy,
                                     int max_atoms, const OracleBounds& bounds) {
  Explorer explorer(factory, policy, entity, mode, max_atoms, bounds);
  return explorer.run(factory, entrypoint);
}

}  // namespace rbacscan::oracle
