#include "rbacscan/generator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "rbacscan/ingest.hpp"

namespace rbacscan {

std::size_t Rng::below(std::size_t n) {
  // Multiply-high maps 64 random bits onto [0, n) without modulo bias worth
  // caring about here, and identically on every platform.
  return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

namespace {

// Appends nodes in program order and wires each new node to every dangling
// exit of the previous statement.
class CfgBuilder {
 public:
  using Exit = std::pair<std::string, std::optional<bool>>;

  CfgBuilder() { open_ = {{emit_raw(StartNode{}), std::nullopt}}; }

  std::string emit(NodePayload payload) {
    const std::string id = emit_raw(std::move(payload));
    for (const auto& [from, label] : open_) cfg_.edges.push_back({from, id, label});
    open_ = {{id, std::nullopt}};
    return id;
  }

  // if (cond) { then_part(); } else { else_part(); }
  template <typename Then, typename Else>
  void branch(Condition cond, Then then_part, Else else_part) {
    const std::string c = emit(CondNode{std::move(cond)});
    open_ = {{c, true}};
    then_part();
    auto after_then = open_;
    open_ = {{c, false}};
    else_part();
    open_.insert(open_.end(), after_then.begin(), after_then.end());
  }

  // while (cond) { body(); } — body must emit at least one node.
  template <typename Body>
  void loop(Condition cond, Body body) {
    const std::string c = emit(CondNode{std::move(cond)});
    open_ = {{c, true}};
    body();
    for (const auto& [from, label] : open_) cfg_.edges.push_back({from, c, label});
    open_ = {{c, false}};
  }

  std::size_t size() const { return cfg_.nodes.size(); }

  Cfg finish() {
    emit(EndNode{});
    open_.clear();
    return std::move(cfg_);
  }

 private:
  std::string emit_raw(NodePayload payload) {
    std::string id = "n" + std::to_string(cfg_.nodes.size());
    cfg_.nodes.push_back({id, std::move(payload)});
    return id;
  }

  Cfg cfg_;
  std::vector<Exit> open_;
};

std::string role_name(std::size_t i) { return "R" + std::to_string(i); }

std::string default_role_name(std::size_t i) {
  if (i == 0) return "Anonymous";
  if (i == 1) return "Registered";
  return "Default" + std::to_string(i);
}

std::set<std::string> random_subset(Rng& rng, const std::vector<std::string>& pool, double p) {
  std::set<std::string> out;
  for (const auto& r : pool) {
    if (rng.chance(p)) out.insert(r);
  }
  if (out.empty() && !pool.empty()) out.insert(pool[rng.below(pool.size())]);
  return out;
}

std::vector<std::string> non_default_roles(const Factory& f) {
  std::vector<std::string> out;
  for (const auto& r : f.roles) {
    if (!f.default_roles.contains(r)) out.push_back(r);
  }
  return out;
}

void check_params(const GenParams& p) {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
  };
  prob(p.guard_probability, "guard_probability");
  prob(p.access_probability, "access_probability");
  prob(p.grant_probability, "grant_probability");
  prob(p.call_probability, "call_probability");
  prob(p.branch_probability, "branch_probability");
  prob(p.loop_probability, "loop_probability");
  prob(p.recursion_probability, "recursion_probability");
  prob(p.policy_coverage, "policy_coverage");
  if (p.modules == 0) throw std::invalid_argument("at least one module is required");
  if (p.roles + p.default_roles == 0) throw std::invalid_argument("at least one role is required");
  if (p.library_modules >= p.modules && p.library_modules > 0) {
    throw std::invalid_argument("library_modules must leave at least one application module");
  }
  if (p.max_cfg_nodes != 0 && p.max_cfg_nodes < 8) throw std::invalid_argument("max_cfg_nodes must be 0 or >= 8");
  if (p.plant_flaws > 0) {
    if (p.entities == 0) throw std::invalid_argument("plant_flaws > 0 needs at least one entity");
    if (p.roles == 0) throw std::invalid_argument("plant_flaws > 0 needs at least one non-default role");
    if (p.screens_per_module == 0) throw std::invalid_argument("plant_flaws > 0 needs at least one screen");
    if (p.policy_coverage <= 0.0) throw std::invalid_argument("plant_flaws > 0 needs policy_coverage > 0");
  }
}

class FactoryGenerator {
 public:
  explicit FactoryGenerator(const GenParams& p) : p_(p), rng_(p.seed) {}

  GeneratedFactory run() {
    GeneratedFactory out;
    Factory& f = out.factory;
    f.name = "Synthetic" + std::to_string(p_.seed);
    for (std::size_t i = 0; i < p_.default_roles; ++i) {
      f.roles.insert(default_role_name(i));
      f.default_roles.insert(default_role_name(i));
    }
    for (std::size_t i = 0; i < p_.roles; ++i) f.roles.insert(role_name(i));
    all_roles_.assign(f.roles.begin(), f.roles.end());
    plain_roles_ = non_default_roles(f);

    f.modules.resize(p_.modules);
    for (std::size_t m = 0; m < p_.modules; ++m) {
      f.modules[m].name = (m < p_.library_modules ? "Lib" : "M") + std::to_string(m);
    }
    for (std::size_t e = 0; e < p_.entities; ++e) {
      f.entities.push_back({"E" + std::to_string(e), f.modules[e % p_.modules].name});
    }

    // Policy first: sound guards need to know the allowed roles.
    out.policy = generate_policy(f, p_.seed ^ 0x9e3779b97f4a7c15ULL, p_.policy_coverage);
    if (p_.plant_flaws > 0 && out.policy.rules.empty()) {
      // Coverage rounded everything away; keep one rule so flaws can be planted.
      out.policy = generate_policy(f, p_.seed ^ 0x9e3779b97f4a7c15ULL, 1.0);
      out.policy.rules.resize(1);
    }
    for (const auto& r : out.policy.rules) rule_by_entity_[r.entity] = &r;

    // Screens and their allowed roles come before planting.
    for (std::size_t m = 0; m < p_.modules; ++m) {
      if (m < p_.library_modules) continue;
      for (std::size_t s = 0; s < p_.screens_per_module; ++s) {
        Entrypoint ep;
        ep.name = "S" + std::to_string(s);
        ep.allowed_roles = random_subset(rng_, plain_roles_.empty() ? all_roles_ : plain_roles_, 0.35);
        if (!f.default_roles.empty() && rng_.chance(0.1)) {
          ep.allowed_roles.insert(*std::next(f.default_roles.begin(), rng_.below(f.default_roles.size())));
        }
        f.modules[m].screens.push_back(std::move(ep));
      }
    }

    plant(out);

    for (std::size_t m = 0; m < p_.modules; ++m) {
      auto& mod = f.modules[m];
      for (std::size_t s = 0; s < mod.screens.size(); ++s) {
        mod.screens[s].cfg = routine_cfg(f, m, std::nullopt, planted_calls_[{m, s}]);
      }
      for (std::size_t a = 0; a < p_.actions_per_module; ++a) {
        mod.actions.push_back({"A" + std::to_string(a), routine_cfg(f, m, a, {})});
      }
    }
    for (const auto& [m, action] : planted_actions_) f.modules[m].actions.push_back(action);
    return out;
  }

 private:
  void plant(GeneratedFactory& out) {
    const Factory& f = out.factory;
    std::vector<std::pair<std::size_t, std::size_t>> screens;
    for (std::size_t m = 0; m < f.modules.size(); ++m) {
      for (std::size_t s = 0; s < f.modules[m].screens.size(); ++s) screens.emplace_back(m, s);
    }
    for (std::size_t k = 0; k < p_.plant_flaws; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
        const auto [m, s] = screens[rng_.below(screens.size())];
        const PolicyRule& rule = out.policy.rules[rng_.below(out.policy.rules.size())];
        const AccessMode mode = rng_.chance(0.5) ? AccessMode::Read : AccessMode::Write;
        const Entrypoint& ep = f.modules[m].screens[s];
        std::set<std::string> entering = ep.allowed_roles;
        entering.insert(f.default_roles.begin(), f.default_roles.end());
        std::vector<std::string> outside;
        for (const auto& r : entering) {
          if (!rule.roles_for(mode).contains(r)) outside.push_back(r);
        }
        if (outside.empty()) continue;
        const std::string role = outside[rng_.below(outside.size())];

        ActionDef leak;
        leak.name = "Planted" + std::to_string(k);
        CfgBuilder b;
        b.emit(AccessNode{rule.entity, mode});
        leak.cfg = b.finish();
        planted_calls_[{m, s}].push_back(qualified_name(f.modules[m].name, leak.name));
        planted_actions_.emplace_back(m, std::move(leak));
        out.planted.push_back({qualified_name(f.modules[m].name, ep.name), rule.entity, mode, role});
        placed = true;
      }
      if (!placed) throw std::invalid_argument("could not place planted flaw " + std::to_string(k));
    }
    std::sort(out.planted.begin(), out.planted.end());
    out.planted.erase(std::unique(out.planted.begin(), out.planted.end()), out.planted.end());
  }

  Condition random_atom() {
    if (!all_roles_.empty() && rng_.chance(0.7)) {
      return Condition::check_role(all_roles_[rng_.below(all_roles_.size())]);
    }
    return Condition::opaque("c" + std::to_string(rng_.below(4)));
  }

  Condition random_condition() {
    const double r = rng_.unit();
    if (r < 0.45) return random_atom();
    if (r < 0.6) return Condition::negate(random_atom());
    if (r < 0.8) return Condition::all_of({random_atom(), random_atom()});
    if (r < 0.95) return Condition::any_of({random_atom(), random_atom()});
    return Condition::any_of({Condition::all_of({random_atom(), random_atom()}), Condition::negate(random_atom())});
  }

  // check_role of an allowed role, possibly conjoined with something else.
  Condition sound_guard(const std::set<std::string>& allowed) {
    const std::string role = *std::next(allowed.begin(), rng_.below(allowed.size()));
    Condition c = Condition::check_role(role);
    if (rng_.chance(0.3)) return Condition::all_of({std::move(c), random_atom()});
    return c;
  }

  std::optional<std::string> pick_callee(const Factory& f, std::size_t m, std::optional<std::size_t> action) {
    const std::size_t n = p_.actions_per_module;
    if (n == 0) return std::nullopt;
    const std::string& own = f.modules[m].name;
    auto in_module = [&](std::size_t mod, std::size_t lo, std::size_t hi) -> std::optional<std::string> {
      if (lo >= hi) return std::nullopt;
      return qualified_name(f.modules[mod].name, "A" + std::to_string(lo + rng_.below(hi - lo)));
    };
    if (action && rng_.chance(p_.recursion_probability)) return in_module(m, 0, *action + 1);

    const std::size_t own_lo = action ? *action + 1 : 0;
    const bool is_library = m < p_.library_modules;
    std::size_t foreign_modules = 0;
    std::size_t foreign_first = 0;
    if (p_.library_modules > 0) {
      if (!is_library) foreign_modules = p_.library_modules;
    } else {
      foreign_first = m + 1;
      foreign_modules = p_.modules - m - 1;
    }
    const std::size_t own_count = n - std::min(n, own_lo);
    const std::size_t total = own_count + foreign_modules * n;
    if (total == 0) return std::nullopt;
    // Prefer local calls: half the time stay in the module when possible.
    if (own_count > 0 && (foreign_modules == 0 || rng_.chance(0.5))) return in_module(m, own_lo, n);
    if (foreign_modules == 0) return std::nullopt;
    const std::size_t mod = foreign_first + rng_.below(foreign_modules);
    (void)own;
    return in_module(mod, 0, n);
  }

  std::size_t target_size() {
    const std::size_t mean = std::max<std::size_t>(p_.cfg_nodes_mean, 3);
    std::size_t t = mean / 2 + rng_.below(mean + 1);
    if (p_.max_cfg_nodes != 0) t = std::min(t, p_.max_cfg_nodes);
    return std::max<std::size_t>(t, 3);
  }

  // Upper bound on what a statement may emit, kept within max_cfg_nodes.
  static constexpr std::size_t kMaxStatementNodes = 6;

  void statement(CfgBuilder& b, const Factory& f, std::size_t m, std::optional<std::size_t> action,
                 std::size_t budget, int depth) {
    const double r = rng_.unit();
    double acc = 0;
    if (r < (acc += p_.access_probability) && !f.entities.empty()) {
      const Entity& e = f.entities[rng_.below(f.entities.size())];
      const AccessMode mode = rng_.chance(0.5) ? AccessMode::Read : AccessMode::Write;
      auto rule = rule_by_entity_.find(e.name);
      if (rule != rule_by_entity_.end() && rng_.chance(p_.guard_probability)) {
        b.branch(sound_guard(rule->second->roles_for(mode)), [&] { b.emit(AccessNode{e.name, mode}); }, [] {});
      } else {
        b.emit(AccessNode{e.name, mode});
      }
      return;
    }
    if (r < (acc += p_.call_probability)) {
      if (auto callee = pick_callee(f, m, action)) {
        b.emit(CallNode{*callee});
        return;
      }
    }
    if (r < (acc += p_.grant_probability) && !all_roles_.empty()) {
      const std::string role = all_roles_[rng_.below(all_roles_.size())];
      if (rng_.chance(0.6)) {
        b.emit(GrantNode{role});
      } else {
        b.emit(RevokeNode{role});
      }
      return;
    }
    if (depth < 2 && budget >= 4) {
      if (r < (acc += p_.branch_probability)) {
        const std::size_t inner = std::min<std::size_t>(budget - 1, 3);
        b.branch(random_condition(), [&] { statement(b, f, m, action, inner / 2 + 1, depth + 1); },
                 [&] {
                   if (rng_.chance(0.5)) statement(b, f, m, action, inner / 2, depth + 1);
                 });
        return;
      }
      if (r < (acc += p_.loop_probability)) {
        b.loop(random_condition(), [&] { statement(b, f, m, action, 2, depth + 1); });
        return;
      }
    }
    b.emit(OtherNode{});
  }

  Cfg routine_cfg(const Factory& f, std::size_t m, std::optional<std::size_t> action,
                  const std::vector<std::string>& planted) {
    CfgBuilder b;
    for (const auto& target : planted) b.emit(CallNode{target});
    const std::size_t target = target_size();
    const std::size_t cap = p_.max_cfg_nodes == 0 ? SIZE_MAX : p_.max_cfg_nodes;
    // +1 for the end node.
    while (b.size() + 1 < target && b.size() + 1 + kMaxStatementNodes <= cap) {
      statement(b, f, m, action, std::min(target - b.size() - 1, kMaxStatementNodes), 0);
    }
    return b.finish();
  }

  GenParams p_;
  Rng rng_;
  std::vector<std::string> all_roles_;
  std::vector<std::string> plain_roles_;
  std::map<std::string, const PolicyRule*> rule_by_entity_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> planted_calls_;
  std::vector<std::pair<std::size_t, ActionDef>> planted_actions_;
};

}  // namespace

Policy generate_policy(const Factory& factory, std::uint64_t seed, double coverage) {
  Rng rng(seed);
  std::vector<std::string> pool = non_default_roles(factory);
  if (pool.empty()) pool.assign(factory.roles.begin(), factory.roles.end());
  Policy policy;
  if (pool.empty()) return policy;
  for (const auto& e : factory.entities) {
    if (!rng.chance(coverage)) continue;
    PolicyRule rule;
    rule.entity = e.name;
    rule.read = random_subset(rng, pool, 0.5);
    rule.write = random_subset(rng, pool, 0.3);
    policy.rules.push_back(std::move(rule));
  }
  return policy;
}

GeneratedFactory generate_factory(const GenParams& params) {
  check_params(params);
  return FactoryGenerator(params).run();
}

std::optional<GenParams> preset_params(std::string_view name, std::uint64_t seed) {
  GenParams p;
  p.seed = seed;
  if (name == "B-scale") {
    p.modules = 691;
    p.library_modules = 40;
    p.screens_per_module = 10;
    p.actions_per_module = 36;
    p.entities = 2000;
    p.roles = 30;
    p.cfg_nodes_mean = 14;
    p.access_probability = 0.16;
    p.call_probability = 0.45;
    p.guard_probability = 0.5;
    p.grant_probability = 0.04;
    p.branch_probability = 0.1;
    p.loop_probability = 0.02;
    p.plant_flaws = 25;
    p.policy_coverage = 0.1;
    return p;
  }
  if (name == "oracle") {
    // Shape varies with the seed but stays within brute-force reach.
    Rng rng(seed ^ 0x5bd1e995ULL);
    p.modules = 1 + rng.below(3);
    p.screens_per_module = 1 + rng.below(2);
    p.actions_per_module = 1 + rng.below(3);
    p.entities = 1 + rng.below(3);
    p.roles = 1 + rng.below(5);
    p.cfg_nodes_mean = 4 + rng.below(8);
    p.max_cfg_nodes = 20;
    p.access_probability = 0.25;
    p.call_probability = 0.2;
    p.guard_probability = 0.3;
    p.grant_probability = 0.12;
    p.branch_probability = 0.25;
    p.loop_probability = 0.08;
    p.plant_flaws = rng.below(2);
    return p;
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"mockup", "B-scale", "oracle"}; }

std::string serialize_planted(const std::vector<PlantedFlaw>& planted) {
  std::vector<PlantedFlaw> sorted = planted;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  nlohmann::ordered_json flaws = nlohmann::ordered_json::array();
  for (const auto& p : sorted) {
    flaws.push_back({{"screen", p.screen}, {"entity", p.entity}, {"mode", std::string(to_string(p.mode))},
                     {"role", p.role}});
  }
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["planted"] = std::move(flaws);
  return j.dump(2) + "\n";
}

std::vector<PlantedFlaw> parse_planted(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<PlantedFlaw> out;
    for (const auto& p : j.at("planted")) {
      auto mode = parse_access_mode(p.at("mode").get<std::string>());
      if (!mode) throw ParseError(ParseError::Kind::Schema, "bad mode in planted flaw");
      out.push_back({p.at("screen").get<std::string>(), p.at("entity").get<std::string>(), *mode,
                     p.at("role").get<std::string>()});
    }
    return out;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(ParseError::Kind::Syntax, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseError::Kind::Schema, e.what());
  }
}

// ---------------------------------------------------------------------------
// Law-firm mock-up

namespace {

struct MockOp {
  std::string call;  // qualified target, or empty for an access
  std::string entity;
  AccessMode mode = AccessMode::Read;
};

MockOp call(std::string target) { return {std::move(target), {}, AccessMode::Read}; }
MockOp read(std::string entity) { return {{}, std::move(entity), AccessMode::Read}; }
MockOp write(std::string entity) { return {{}, std::move(entity), AccessMode::Write}; }

// A run of operations, guarded by check_role(guard) unless guard is empty.
// kAuto picks a role that protects every access the operations can reach.
struct MockBlock {
  std::string guard;
  std::vector<MockOp> ops;
};

const std::string kAuto = "*";

class MockupBuilder {
 public:
  explicit MockupBuilder(const Policy& policy) : policy_(policy) {}

  Cfg routine(const std::string& qualified, const std::set<std::string>& allowed, const std::vector<MockBlock>& blocks,
              const std::vector<NodePayload>& prologue = {}) {
    CfgBuilder b;
    for (const auto& p : prologue) b.emit(p);
    std::set<std::pair<std::string, AccessMode>> reach;
    for (const auto& block : blocks) {
      auto emit_ops = [&] {
        for (const auto& op : block.ops) {
          if (!op.call.empty()) {
            b.emit(CallNode{op.call});
          } else {
            b.emit(AccessNode{op.entity, op.mode});
          }
        }
      };
      for (const auto& op : block.ops) {
        if (!op.call.empty()) {
          const auto& r = reach_.at(op.call);
          reach.insert(r.begin(), r.end());
        } else {
          reach.insert({op.entity, op.mode});
        }
      }
      if (block.guard.empty()) {
        emit_ops();
      } else {
        b.branch(Condition::check_role(pick_guard(block, allowed)), emit_ops, [] {});
      }
    }
    reach_[qualified] = std::move(reach);
    return b.finish();
  }

 private:
  std::string pick_guard(const MockBlock& block, const std::set<std::string>& allowed) {
    if (block.guard != kAuto) return block.guard;
    std::set<std::pair<std::string, AccessMode>> reach;
    for (const auto& op : block.ops) {
      if (!op.call.empty()) {
        const auto& r = reach_.at(op.call);
        reach.insert(r.begin(), r.end());
      } else {
        reach.insert({op.entity, op.mode});
      }
    }
    auto protects = [&](const std::string& role) {
      return std::all_of(reach.begin(), reach.end(), [&](const auto& acc) {
        const PolicyRule* rule = policy_.find(acc.first);
        return rule == nullptr || rule->roles_for(acc.second).contains(role);
      });
    };
    for (const auto& role : allowed) {
      if (protects(role)) return role;
    }
    return "Admin";
  }

  const Policy& policy_;
  std::map<std::string, std::set<std::pair<std::string, AccessMode>>> reach_;
};

}  // namespace

GeneratedFactory generate_mockup() {
  GeneratedFactory out;
  Factory& f = out.factory;
  f.name = "LawyerExample";
  f.roles = {"Admin", "Anonymous", "Client", "Customer", "Lawyer", "Registered"};
  f.default_roles = {"Anonymous", "Registered"};
  const std::string ui = "LawyerExample";
  const std::string data = "DataModel";
  f.entities = {{"Client", data}, {"Lawyer", data}, {"LegalCase", data}};

  out.policy.rules = {
      {"Client", {"Admin", "Customer", "Lawyer"}, {"Admin", "Lawyer"}},
      {"Lawyer", {"Admin", "Client", "Customer", "Lawyer"}, {"Admin"}},
      {"LegalCase", {"Admin", "Client", "Lawyer"}, {"Admin", "Lawyer"}},
  };

  MockupBuilder mb(out.policy);
  ModuleDef data_module{data, {}, {}};
  ModuleDef ui_module{ui, {}, {}};

  // Plain CRUD in the data module; protection is the callers' job.
  for (const std::string e : {"Client", "Lawyer", "LegalCase"}) {
    const std::vector<std::pair<std::string, std::vector<MockOp>>> crud = {
        {"Get" + e, {read(e)}},
        {"List" + e + "s", {read(e)}},
        {"Create" + e, {write(e)}},
        {"Update" + e, {read(e), write(e)}},
        {"Delete" + e, {write(e)}},
    };
    for (const auto& [name, ops] : crud) {
      data_module.actions.push_back({name, mb.routine(qualified_name(data, name), {}, {{"", ops}})});
    }
  }

  auto d = [&](const std::string& action) { return call(qualified_name(data, action)); };
  auto u = [&](const std::string& action) { return call(qualified_name(ui, action)); };

  auto add_action = [&](const std::string& name, const std::vector<MockBlock>& blocks,
                        const std::vector<NodePayload>& prologue = {}) {
    ui_module.actions.push_back({name, mb.routine(qualified_name(ui, name), {}, blocks, prologue)});
  };
  add_action("AssignLawyer", {{"Admin", {d("GetLawyer"), d("UpdateLegalCase"), read("LegalCase")}}});
  add_action("CloseCase", {{"Lawyer", {d("GetLegalCase"), d("UpdateLegalCase"), write("LegalCase")}}});
  // Only administrators may delete a case.
  add_action("RemoveCase", {{"Admin", {d("DeleteLegalCase")}}});
  add_action("CompleteSignUp", {{"Admin", {d("CreateClient")}}}, {RevokeNode{"Anonymous"}, GrantNode{"Registered"}});
  add_action("LoadDashboard", {{"Lawyer", {d("ListLegalCases"), d("ListClients"), read("Lawyer")}}});

  struct MockScreen {
    std::string name;
    std::set<std::string> allowed;
    std::vector<MockBlock> blocks;
  };
  const std::set<std::string> staff = {"Admin", "Lawyer"};
  const std::set<std::string> everyone = {"Anonymous", "Registered"};
  const std::vector<MockScreen> screens = {
      {"Home", everyone, {{kAuto, {d("ListLawyers"), u("LoadDashboard"), d("ListLegalCases")}}}},
      {"Login", everyone, {{kAuto, {u("CompleteSignUp"), d("GetClient"), d("GetLawyer")}}}},
      {"SignUp", everyone, {{kAuto, {u("CompleteSignUp"), d("CreateClient"), d("ListLawyers")}}}},
      {"About", everyone, {{kAuto, {d("ListLawyers"), d("GetLawyer")}}}},
      {"Contact", {"Registered"}, {{kAuto, {d("ListLawyers"), d("GetClient"), d("UpdateClient")}}}},
      {"Dashboard", staff,
       {{kAuto, {u("LoadDashboard"), d("ListClients"), d("ListLegalCases"), d("ListLawyers"), read("LegalCase")}}}},
      {"ClientList", {"Admin", "Lawyer", "Customer"},
       {{kAuto, {d("ListClients"), d("GetClient"), d("DeleteClient"), read("Client")}}}},
      {"ClientDetail", {"Admin", "Lawyer", "Customer"},
       {{kAuto, {d("GetClient"), d("ListLegalCases"), d("GetLawyer"), read("Client")}},
        {"Admin", {d("DeleteClient"), d("UpdateClient")}}}},
      {"ClientEdit", staff, {{kAuto, {d("GetClient"), d("UpdateClient"), d("ListLawyers"), write("Client")}}}},
      {"NewClient", staff, {{kAuto, {d("CreateClient"), d("ListLawyers"), d("ListClients"), u("AssignLawyer")}}}},
      {"LawyerList", {"Admin", "Lawyer", "Client"},
       {{kAuto, {d("ListLawyers"), d("GetLawyer"), read("Lawyer")}}, {"Admin", {d("DeleteLawyer")}}}},
      {"LawyerDetail", {"Admin", "Lawyer", "Client", "Customer"},
       {{kAuto, {d("GetLawyer"), d("ListLegalCases"), read("Lawyer")}}, {"Admin", {d("UpdateLawyer")}}}},
      {"LawyerEdit", {"Admin"}, {{kAuto, {d("GetLawyer"), d("UpdateLawyer"), d("DeleteLawyer"), write("Lawyer")}}}},
      {"NewLawyer", {"Admin"}, {{kAuto, {d("CreateLawyer"), d("ListLawyers"), d("GetLawyer")}}}},
      {"CaseList", {"Admin", "Lawyer", "Client"},
       {{kAuto, {d("ListLegalCases"), d("GetLegalCase"), read("LegalCase")}}, {"Admin", {u("RemoveCase")}}}},
      {"CaseDetail", {"Admin", "Lawyer", "Client"},
       {{kAuto, {d("GetLegalCase"), d("GetLawyer"), d("GetClient")}},
        {"Lawyer", {u("CloseCase"), u("AssignLawyer"), write("LegalCase")}}}},
      {"CaseEdit", staff,
       {{kAuto, {d("GetLegalCase"), d("UpdateLegalCase"), u("CloseCase"), d("ListClients"), write("LegalCase")}}}},
      {"NewCase", staff,
       {{kAuto, {d("CreateLegalCase"), d("ListClients"), d("ListLawyers"), u("AssignLawyer")}}}},
      {"MyCases", {"Client", "Lawyer"},
       {{kAuto, {d("ListLegalCases"), d("GetLegalCase"), d("GetLawyer"), read("LegalCase")}}}},
      {"MyProfile", {"Client", "Customer", "Lawyer"},
       {{kAuto, {d("GetClient"), d("GetLawyer")}}, {"Admin", {d("UpdateClient"), d("UpdateLawyer")}}}},
      {"Billing", {"Admin", "Customer"},
       {{kAuto, {d("ListClients"), d("GetClient"), d("ListLegalCases"), read("Client")}}}},
      {"Reports", staff,
       {{kAuto, {d("ListClients"), d("ListLawyers"), d("ListLegalCases"), u("LoadDashboard"), read("Client")}}}},
      {"Settings", {"Admin"}, {{kAuto, {d("UpdateLawyer"), d("UpdateClient"), d("UpdateLegalCase")}}}},
      {"UserManagement", {"Admin"},
       {{kAuto, {d("ListClients"), d("DeleteClient"), d("ListLawyers"), d("DeleteLawyer"), d("CreateLawyer"),
                 u("RemoveCase"), write("Client")}}}},
      // Admin page that forgets the role check before listing clients.
      {"SecretAdminPage", {"Admin", "Client"},
       {{"", {d("ListClients"), d("GetClient")}},
        {kAuto, {d("DeleteClient"), d("UpdateLegalCase"), u("RemoveCase"), d("DeleteLawyer")}}}},
  };
  // Maintenance shortcuts shown to privileged users on most pages.
  const std::map<std::string, std::vector<MockOp>> shortcuts = {
      {"Home", {d("GetLegalCase"), d("GetClient"), d("GetLawyer")}},
      {"Login", {d("ListClients"), d("ListLegalCases")}},
      {"SignUp", {d("GetClient"), d("UpdateClient")}},
      {"About", {d("UpdateLawyer")}},
      {"Contact", {d("CreateClient"), d("ListClients")}},
      {"Dashboard", {d("GetLegalCase"), d("GetClient"), d("GetLawyer"), u("CloseCase")}},
      {"ClientList", {d("UpdateClient"), d("CreateClient"), d("ListLegalCases")}},
      {"ClientDetail", {d("CreateLegalCase"), u("AssignLawyer")}},
      {"ClientEdit", {d("DeleteClient"), d("ListClients"), d("ListLegalCases")}},
      {"NewClient", {d("GetClient"), d("UpdateClient")}},
      {"LawyerList", {d("CreateLawyer"), d("UpdateLawyer"), d("ListLegalCases")}},
      {"LawyerDetail", {d("DeleteLawyer"), d("ListClients")}},
      {"LawyerEdit", {d("ListLawyers"), d("ListLegalCases")}},
      {"NewLawyer", {d("UpdateLawyer"), d("ListLegalCases")}},
      {"CaseList", {d("UpdateLegalCase"), d("CreateLegalCase"), d("DeleteLegalCase"), u("AssignLawyer")}},
      {"CaseDetail", {d("UpdateLegalCase"), d("DeleteLegalCase"), u("RemoveCase")}},
      {"CaseEdit", {u("AssignLawyer"), d("GetLawyer"), u("RemoveCase")}},
      {"NewCase", {d("GetClient"), d("GetLawyer")}},
      {"MyCases", {d("UpdateLegalCase"), u("CloseCase")}},
      {"Billing", {d("UpdateClient"), d("CreateClient")}},
      {"Reports", {d("GetClient"), d("GetLegalCase")}},
      {"Settings", {d("ListClients")}},
  };
  for (const auto& s : screens) {
    std::vector<MockBlock> blocks = s.blocks;
    if (auto it = shortcuts.find(s.name); it != shortcuts.end()) blocks.push_back({kAuto, it->second});
    ui_module.screens.push_back({s.name, s.allowed, mb.routine(qualified_name(ui, s.name), s.allowed, blocks)});
  }

  f.modules = {std::move(ui_module), std::move(data_module)};
  for (const std::string role : {"Anonymous", "Client", "Registered"}) {
    out.planted.push_back({qualified_name(ui, "SecretAdminPage"), "Client", AccessMode::Read, role});
  }
  std::sort(out.planted.begin(), out.planted.end());
  return out;
}

}  // namespace rbacscan
