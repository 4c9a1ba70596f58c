#include "rbacscan/cli.hpp"

#include <sys/resource.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "rbacscan/generator.hpp"
#include "rbacscan/ingest.hpp"
#include "rbacscan/pipeline.hpp"
#include "rbacscan/report.hpp"

namespace rbacscan {

namespace {

struct AnalyzeConfig {
  std::string factory;
  std::string policy;
  std::string out;
  std::string html;
  int max_atoms = kDefaultMaxAtoms;
  std::size_t max_paths = 1000;
  std::size_t max_states = AnalysisLimits{}.max_summary_states;
  unsigned jobs = 1;
  bool timestamp = false;
  bool stats = false;
  std::string dump_graph;
  std::string dump_dot;
};

struct GenConfig {
  std::string preset;
  std::string out;
  GenParams params;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

long peak_rss_kib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

void print_violations(const ParseError& e, std::ostream& err) {
  err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
  for (const auto& v : e.violations()) err << "  " << v.location << ": " << v.message << "\n";
}

int cmd_validate(const std::string& factory_path, const std::string& policy_path, std::ostream& out) {
  const Factory factory = parse_factory(read_file(factory_path));
  if (!policy_path.empty()) parse_policy(read_file(policy_path), factory);
  out << "ok\n";
  return kExitClean;
}

int cmd_analyze(const AnalyzeConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const Factory factory = parse_factory(read_file(cfg.factory));
  const Policy policy = parse_policy(read_file(cfg.policy), factory);
  const FactoryIndex index = index_factory(factory, &policy);

  PipelineOptions options;
  options.limits.max_atoms = cfg.max_atoms;
  options.limits.max_paths = cfg.max_paths;
  options.limits.max_summary_states = cfg.max_states;
  options.jobs = cfg.jobs;
  const PipelineResult result = run_pipeline(index, policy, options);

  if (!cfg.dump_graph.empty()) write_file(cfg.dump_graph, call_graph_json(result.graph));
  if (!cfg.dump_dot.empty()) write_file(cfg.dump_dot, call_graph_dot(result.graph));

  Report report = build_report(index, result.graph, result.candidates, result.analyses);
  if (cfg.timestamp) report.generated_at = utc_now();
  write_file(cfg.out, emit_json(report));
  if (!cfg.html.empty()) write_file(cfg.html, emit_html(report));

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  out << "modules=" << report.summary.modules_with_findings << " screens=" << report.summary.screens_with_findings
      << " findings=" << report.summary.total_findings << " elapsed_ms=" << elapsed << "\n";
  if (cfg.stats) {
    const GraphStats gs = graph_stats(result.graph);
    err << "graph_nodes=" << gs.node_count << " graph_edges=" << gs.edge_count << " graph_ms=" << result.graph_millis
        << " candidates=" << result.candidates.size() << " search_ms=" << result.search_millis
        << " analysis_ms=" << result.analysis_millis << " peak_rss_kib=" << peak_rss_kib() << "\n";
  }
  return report.summary.total_findings > 0 ? kExitFindings : kExitClean;
}

int cmd_gen(const GenConfig& cfg, std::ostream& out) {
  GeneratedFactory g;
  if (cfg.preset == "mockup") {
    g = generate_mockup();
  } else {
    g = generate_factory(cfg.params);
  }
  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  write_file((dir / "factory.json").string(), serialize_factory(g.factory));
  write_file((dir / "policy.json").string(), serialize_policy(g.policy));
  write_file((dir / "planted.json").string(), serialize_planted(g.planted));
  out << "wrote " << (dir / "factory.json").string() << ", policy.json, planted.json (" << g.planted.size()
      << " planted)\n";
  return kExitClean;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Role-based access control checker for application factories", "rbacscan"};
  app.require_subcommand(1);

  std::string validate_factory_path;
  std::string validate_policy_path;
  auto* validate = app.add_subcommand("validate", "Check a factory (and optionally a policy) for well-formedness");
  validate->add_option("factory", validate_factory_path, "Factory JSON")->required();
  validate->add_option("--policy", validate_policy_path, "Policy JSON");

  AnalyzeConfig acfg;
  auto* analyze = app.add_subcommand("analyze", "Find role-based access flaws and write a report");
  analyze->add_option("--factory", acfg.factory, "Factory JSON")->required();
  analyze->add_option("--policy", acfg.policy, "Policy JSON")->required();
  analyze->add_option("--out", acfg.out, "Report JSON output")->required();
  analyze->add_option("--html", acfg.html, "Also write an HTML report here");
  analyze->add_option("--max-atoms", acfg.max_atoms, "Exact entailment up to this many atoms per condition")
      ->check(CLI::Range(0, 24));
  analyze->add_option("--max-paths", acfg.max_paths, "Call paths kept per candidate")->check(CLI::PositiveNumber);
  analyze->add_option("--max-states", acfg.max_states, "Role-state budget per candidate")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--jobs", acfg.jobs, "Worker threads")->check(CLI::Range(1U, 1024U));
  analyze->add_flag("--timestamp", acfg.timestamp, "Record generation time in the report");
  analyze->add_option("--dump-graph", acfg.dump_graph, "Write the call graph as JSON");
  analyze->add_option("--dump-dot", acfg.dump_dot, "Write the call graph as Graphviz DOT");
  analyze->add_flag("--stats", acfg.stats, "Print graph size, timings and peak memory to stderr");

  GenConfig gcfg;
  GenParams& p = gcfg.params;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic factory, policy and planted-flaw list");
  gen->add_option("--preset", gcfg.preset, "mockup, B-scale or oracle")
      ->check(CLI::IsMember({"mockup", "B-scale", "oracle"}));
  gen->add_option("--seed", p.seed, "PRNG seed");
  gen->add_option("--out", gcfg.out, "Output directory")->required();
  // Explicit flags override the preset.
  auto* o_modules = gen->add_option("--modules", p.modules, "Modules");
  auto* o_screens = gen->add_option("--screens-per-module", p.screens_per_module, "Screens per module");
  auto* o_actions = gen->add_option("--actions-per-module", p.actions_per_module, "Actions per module");
  auto* o_entities = gen->add_option("--entities", p.entities, "Entities");
  auto* o_roles = gen->add_option("--roles", p.roles, "Non-default roles");
  auto* o_nodes = gen->add_option("--cfg-nodes-mean", p.cfg_nodes_mean, "Mean CFG size");
  auto* o_guard = gen->add_option("--guard-probability", p.guard_probability, "Chance an access is guarded");
  auto* o_access = gen->add_option("--access-probability", p.access_probability, "Chance a statement is an access");
  auto* o_grant = gen->add_option("--grant-probability", p.grant_probability, "Chance of a grant/revoke");
  auto* o_plant = gen->add_option("--plant-flaws", p.plant_flaws, "Flaws to plant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  try {
    if (*validate) return cmd_validate(validate_factory_path, validate_policy_path, out);
    if (*analyze) return cmd_analyze(acfg, out, err);
    if (*gen) {
      if (gcfg.preset == "mockup") {
        for (auto* o : {o_modules, o_screens, o_actions, o_entities, o_roles, o_nodes, o_guard, o_access, o_grant,
                        o_plant}) {
          if (o->count() > 0) {
            err << "error: " << o->get_name() << " cannot be combined with --preset mockup\n";
            return kExitError;
          }
        }
      } else if (!gcfg.preset.empty()) {
        // Re-read the preset, then re-apply explicit flags on top of it.
        GenParams explicit_params = p;
        p = *preset_params(gcfg.preset, explicit_params.seed);
        if (o_modules->count()) p.modules = explicit_params.modules;
        if (o_screens->count()) p.screens_per_module = explicit_params.screens_per_module;
        if (o_actions->count()) p.actions_per_module = explicit_params.actions_per_module;
        if (o_entities->count()) p.entities = explicit_params.entities;
        if (o_roles->count()) p.roles = explicit_params.roles;
        if (o_nodes->count()) p.cfg_nodes_mean = explicit_params.cfg_nodes_mean;
        if (o_guard->count()) p.guard_probability = explicit_params.guard_probability;
        if (o_access->count()) p.access_probability = explicit_params.access_probability;
        if (o_grant->count()) p.grant_probability = explicit_params.grant_probability;
        if (o_plant->count()) p.plant_flaws = explicit_params.plant_flaws;
        if (p.library_modules >= p.modules) p.library_modules = 0;
      }
      return cmd_gen(gcfg, out);
    }
  } catch (const ParseError& e) {
    print_violations(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace rbacscan
