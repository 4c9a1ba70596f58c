#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <map>
#include <optional>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rbacscan/generator.hpp"
#include "rbacscan/ingest.hpp"
#include "rbacscan/oracle.hpp"
#include "rbacscan/pipeline.hpp"
#include "rbacscan/report.hpp"

namespace rbacscan::testing {

inline std::string fixture_path(const std::string& rel) { return std::string(RBACSCAN_FIXTURE_DIR) + "/" + rel; }
inline std::string cli_path() { return RBACSCAN_CLI_PATH; }

// Factory, policy and an index that points into them; kept on the heap so
// the index stays valid when the bundle moves.
struct Loaded {
  Factory factory;
  Policy policy;
  FactoryIndex index;
};

inline std::unique_ptr<Loaded> load(Factory factory, Policy policy) {
  auto l = std::make_unique<Loaded>();
  l->factory = std::move(factory);
  l->policy = std::move(policy);
  l->index = index_factory(l->factory, &l->policy);
  return l;
}

inline std::unique_ptr<Loaded> load_files(const std::string& factory_path, const std::string& policy_path) {
  Factory f = parse_factory(read_file(factory_path));
  Policy p = parse_policy(read_file(policy_path), f);
  return load(std::move(f), std::move(p));
}

inline std::unique_ptr<Loaded> load_fixture(const std::string& dir, const std::string& factory_file = "factory.json") {
  return load_files(fixture_path(dir + "/" + factory_file), fixture_path(dir + "/policy.json"));
}

using oracle::OracleTuple;

// (screen, entity, mode) identifies a candidate.
using CandidateKey = std::tuple<std::string, std::string, AccessMode>;

inline std::map<CandidateKey, std::set<OracleTuple>> analyzer_tuples(const Loaded& l, const PipelineResult& r) {
  std::map<CandidateKey, std::set<OracleTuple>> out;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) {
    const Candidate& c = r.candidates[i];
    const std::string& ep = l.index.routine(c.entrypoint).qualified_name;
    const std::string& entity = l.index.entity(c.entity).name;
    auto& set = out[{ep, entity, c.mode}];
    for (const auto& f : r.analyses[i].findings) set.insert({ep, entity, c.mode, f.violating_roles});
  }
  return out;
}

// Keeps only role sets not strictly contained in another set of the group.
inline std::set<OracleTuple> maximal(const std::set<OracleTuple>& in) {
  std::set<OracleTuple> out;
  for (const auto& t : in) {
    bool dominated = false;
    for (const auto& u : in) {
      if (u.violating_roles != t.violating_roles &&
          std::includes(u.violating_roles.begin(), u.violating_roles.end(), t.violating_roles.begin(),
                        t.violating_roles.end())) {
        dominated = true;
      }
    }
    if (!dominated) out.insert(t);
  }
  return out;
}

// (screen, entity, mode, role) expansion of a report.
inline std::set<PlantedFlaw> report_role_tuples(const Report& report) {
  std::set<PlantedFlaw> out;
  for (const auto& m : report.modules) {
    for (const auto& s : m.screens) {
      for (const auto& f : s.findings) {
        for (const auto& r : f.violating_roles) out.insert({qualified_name(m.name, s.name), f.entity, f.mode, r});
      }
    }
  }
  return out;
}

// start -> body... -> end. With a guard, the body sits on the guard's true
// branch and the false branch goes straight to the end.
Cfg straight_line(const std::vector<NodePayload>& body, const std::optional<Condition>& guard = std::nullopt);

// Factory "T" in module "M" with roles Admin, Lawyer, Registered, Anonymous
// (the last two default) and entities Client, LegalCase. `actions` are
// (name, cfg) pairs; `screens` are (name, allowed roles, cfg).
Factory tiny_factory(std::vector<ActionDef> actions, std::vector<Entrypoint> screens);

// LegalCase: read {Admin, Lawyer}, write {Admin}; Client: read and write {Admin}.
Policy tiny_policy();

// Replaces recursion with `depth` nested copies of each action; the call
// that would exceed the bound becomes a node that loops on itself, so the
// copy never returns and the unrolling only under-approximates.
Factory unroll_recursion(const Factory& factory, std::size_t depth);

// Output of a shell command, and its exit status.
struct CommandResult {
  int status = -1;
  std::string output;
};
CommandResult run_command(const std::string& command);

}  // namespace rbacscan::testing
