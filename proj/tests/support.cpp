#include "support.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>

namespace rbacscan::testing {

Cfg straight_line(const std::vector<NodePayload>& body, const std::optional<Condition>& guard) {
  Cfg cfg;
  cfg.nodes.push_back({"s", StartNode{}});
  std::string prev = "s";
  if (guard) {
    cfg.nodes.push_back({"g", CondNode{*guard}});
    cfg.edges.push_back({"s", "g", std::nullopt});
    cfg.edges.push_back({"g", "e", false});
    prev = "g";
  }
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::string id = "n" + std::to_string(i);
    cfg.nodes.push_back({id, body[i]});
    cfg.edges.push_back({prev, id, prev == "g" ? std::optional<bool>(true) : std::nullopt});
    prev = id;
  }
  cfg.nodes.push_back({"e", EndNode{}});
  cfg.edges.push_back({prev, "e", prev == "g" ? std::optional<bool>(true) : std::nullopt});
  return cfg;
}

Factory tiny_factory(std::vector<ActionDef> actions, std::vector<Entrypoint> screens) {
  Factory f;
  f.name = "T";
  f.roles = {"Admin", "Anonymous", "Lawyer", "Registered"};
  f.default_roles = {"Anonymous", "Registered"};
  f.entities = {{"Client", "M"}, {"LegalCase", "M"}};
  f.modules.push_back({"M", std::move(screens), std::move(actions)});
  return f;
}

Policy tiny_policy() {
  Policy p;
  p.rules.push_back({"Client", {"Admin"}, {"Admin"}});
  p.rules.push_back({"LegalCase", {"Admin", "Lawyer"}, {"Admin"}});
  return p;
}

Factory unroll_recursion(const Factory& factory, std::size_t depth) {
  Factory out = factory;
  for (auto& m : out.modules) {
    m.actions.clear();
    for (auto& s : m.screens) {
      for (auto& n : s.cfg.nodes) {
        if (auto* c = std::get_if<CallNode>(&n.payload)) c->target += "_1";
      }
    }
  }
  for (std::size_t level = 1; level <= depth; ++level) {
    for (std::size_t mi = 0; mi < factory.modules.size(); ++mi) {
      for (const auto& a : factory.modules[mi].actions) {
        ActionDef copy = a;
        copy.name = a.name + "_" + std::to_string(level);
        for (auto& n : copy.cfg.nodes) {
          auto* c = std::get_if<CallNode>(&n.payload);
          if (c == nullptr) continue;
          if (level < depth) {
            c->target += "_" + std::to_string(level + 1);
            continue;
          }
          n.payload = OtherNode{};
          for (auto& e : copy.cfg.edges) {
            if (e.from == n.id) e.to = n.id;
          }
        }
        out.modules[mi].actions.push_back(std::move(copy));
      }
    }
  }
  return out;
}

CommandResult run_command(const std::string& command) {
  CommandResult r;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace rbacscan::testing
