#include "rbacscan/report.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "json.hpp"
#include "rbacscan/ingest.hpp"

namespace rbacscan {

using nlohmann::ordered_json;

std::int64_t risk_score(const std::vector<ReportFinding>& findings, const std::set<std::string>& default_roles) {
  std::int64_t score = 0;
  for (const auto& f : findings) {
    const std::int64_t w = f.mode == AccessMode::Write ? 2 : 1;
    const bool hits_default = std::any_of(f.violating_roles.begin(), f.violating_roles.end(),
                                          [&](const std::string& r) { return default_roles.contains(r); });
    score += w * static_cast<std::int64_t>(f.violating_roles.size()) * (hits_default ? 2 : 1);
  }
  return score;
}

std::int64_t risk_score(const ScreenEntry& screen, const std::set<std::string>& default_roles) {
  return risk_score(screen.findings, default_roles);
}

namespace {

auto finding_key(const ReportFinding& f) {
  return std::tie(f.entity, f.mode, f.witness, f.violating_roles, f.call_path, f.truncated);
}

template <typename Entry>
void rank(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.risk != b.risk) return a.risk > b.risk;
    return a.name < b.name;
  });
}

}  // namespace

Report build_report(const FactoryIndex& index, const CallGraph& graph, const std::vector<Candidate>& candidates,
                    const std::vector<CandidateAnalysis>& analyses) {
  const Factory& factory = index.factory();
  // module -> screen -> entry
  std::map<std::string, std::map<std::string, ScreenEntry>> grouped;

  auto entry_for = [&](RoutineId ep) -> ScreenEntry& {
    const Routine& r = index.routine(ep);
    const std::string& module = factory.modules[r.module].name;
    ScreenEntry& s = grouped[module][r.screen->name];
    if (s.name.empty()) {
      s.name = r.screen->name;
      s.allowed_roles = r.screen->allowed_roles;
    }
    return s;
  };

  for (std::size_t i = 0; i < candidates.size() && i < analyses.size(); ++i) {
    const CandidateAnalysis& a = analyses[i];
    if (a.findings.empty() && !a.incomplete) continue;
    ScreenEntry& s = entry_for(candidates[i].entrypoint);
    s.incomplete = s.incomplete || a.incomplete;
    for (const Finding& f : a.findings) {
      ReportFinding rf;
      rf.entity = index.entity(f.entity).name;
      rf.mode = f.mode;
      rf.violating_roles = f.violating_roles;
      rf.call_path = path_labels(graph, f.call_path);
      rf.witness = f.witness;
      rf.truncated = f.truncated;
      s.findings.push_back(std::move(rf));
    }
  }

  Report report;
  report.factory = factory.name;
  for (auto& [module_name, screens] : grouped) {
    ModuleEntry m;
    m.name = module_name;
    for (auto& [screen_name, s] : screens) {
      std::sort(s.findings.begin(), s.findings.end(),
                [](const ReportFinding& a, const ReportFinding& b) { return finding_key(a) < finding_key(b); });
      s.risk = risk_score(s, factory.default_roles);
      m.risk += s.risk;
      if (!s.findings.empty()) ++report.summary.screens_with_findings;
      report.summary.total_findings += s.findings.size();
      m.screens.push_back(std::move(s));
    }
    rank(m.screens);
    const bool any = std::any_of(m.screens.begin(), m.screens.end(),
                                 [](const ScreenEntry& s) { return !s.findings.empty(); });
    if (any) ++report.summary.modules_with_findings;
    report.modules.push_back(std::move(m));
  }
  rank(report.modules);
  return report;
}

std::string emit_json(const Report& report) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["factory"] = report.factory;
  if (report.generated_at) j["generated_at"] = *report.generated_at;
  j["summary"] = {{"modules_with_findings", report.summary.modules_with_findings},
                  {"screens_with_findings", report.summary.screens_with_findings},
                  {"total_findings", report.summary.total_findings}};
  ordered_json modules = ordered_json::array();
  for (const auto& m : report.modules) {
    ordered_json screens = ordered_json::array();
    for (const auto& s : m.screens) {
      ordered_json findings = ordered_json::array();
      for (const auto& f : s.findings) {
        ordered_json witness = ordered_json::array();
        for (const auto& w : f.witness) witness.push_back({{"container", w.container}, {"node", w.node}});
        ordered_json jf;
        jf["entity"] = f.entity;
        jf["mode"] = std::string(to_string(f.mode));
        jf["violating_roles"] = f.violating_roles;
        jf["call_path"] = f.call_path;
        jf["witness"] = std::move(witness);
        jf["truncated"] = f.truncated;
        findings.push_back(std::move(jf));
      }
      ordered_json js;
      js["name"] = s.name;
      js["risk"] = s.risk;
      js["allowed_roles"] = s.allowed_roles;
      js["incomplete"] = s.incomplete;
      js["findings"] = std::move(findings);
      screens.push_back(std::move(js));
    }
    ordered_json jm;
    jm["name"] = m.name;
    jm["risk"] = m.risk;
    jm["screens"] = std::move(screens);
    modules.push_back(std::move(jm));
  }
  j["modules"] = std::move(modules);
  return j.dump(2) + "\n";
}

Report parse_report_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(ParseError::Kind::Syntax, e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw ParseError(ParseError::Kind::Schema, "unsupported report format_version");
    }
    Report r;
    r.factory = j.at("factory").get<std::string>();
    if (j.contains("generated_at")) r.generated_at = j.at("generated_at").get<std::string>();
    const auto& sum = j.at("summary");
    r.summary.modules_with_findings = sum.at("modules_with_findings").get<std::size_t>();
    r.summary.screens_with_findings = sum.at("screens_with_findings").get<std::size_t>();
    r.summary.total_findings = sum.at("total_findings").get<std::size_t>();
    for (const auto& jm : j.at("modules")) {
      ModuleEntry m;
      m.name = jm.at("name").get<std::string>();
      m.risk = jm.at("risk").get<std::int64_t>();
      for (const auto& js : jm.at("screens")) {
        ScreenEntry s;
        s.name = js.at("name").get<std::string>();
        s.risk = js.at("risk").get<std::int64_t>();
        s.allowed_roles = js.at("allowed_roles").get<std::set<std::string>>();
        s.incomplete = js.at("incomplete").get<bool>();
        for (const auto& jf : js.at("findings")) {
          ReportFinding f;
          f.entity = jf.at("entity").get<std::string>();
          auto mode = parse_access_mode(jf.at("mode").get<std::string>());
          if (!mode) throw ParseError(ParseError::Kind::Schema, "bad access mode in report");
          f.mode = *mode;
          f.violating_roles = jf.at("violating_roles").get<std::set<std::string>>();
          f.call_path = jf.at("call_path").get<std::vector<std::string>>();
          for (const auto& w : jf.at("witness")) {
            f.witness.push_back({w.at("container").get<std::string>(), w.at("node").get<std::string>()});
          }
          f.truncated = jf.at("truncated").get<bool>();
          s.findings.push_back(std::move(f));
        }
        m.screens.push_back(std::move(s));
      }
      r.modules.push_back(std::move(m));
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw ParseError(ParseError::Kind::Schema, e.what());
  }
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string join(const std::set<std::string>& roles) {
  std::string out;
  for (const auto& r : roles) {
    if (!out.empty()) out += ", ";
    out += escape(r);
  }
  return out;
}

std::set<std::string> roles_union(const std::vector<const ReportFinding*>& findings) {
  std::set<std::string> out;
  for (const auto* f : findings) out.insert(f->violating_roles.begin(), f->violating_roles.end());
  return out;
}

void render_graph(std::string& h, const std::vector<const ReportFinding*>& findings) {
  h += "<details class=\"graph\"><summary>Inspect Call Graph</summary>\n";
  for (const auto* f : findings) {
    h += "<div class=\"path\">";
    for (std::size_t i = 0; i < f->call_path.size(); ++i) {
      if (i > 0) h += "<span class=\"arrow\">&rarr;</span>";
      h += "<span class=\"node\">" + escape(f->call_path[i]) + "</span>";
    }
    h += "</div>\n<ol class=\"witness\">";
    for (const auto& w : f->witness) {
      h += "<li><code>" + escape(w.container) + "</code> node <code>" + escape(w.node) + "</code></li>";
    }
    h += "</ol>\n";
    if (f->truncated) h += "<p class=\"notice\">Path list truncated: only the shortest call paths were kept.</p>\n";
  }
  h += "</details>\n";
}

constexpr std::string_view kStyle = R"(body{font-family:sans-serif;margin:2em;color:#222}
details{margin:.3em 0 .3em 1.2em}summary{cursor:pointer}
.risk{font-weight:bold;color:#a00}.roles{color:#555}.notice{color:#b60;font-weight:bold}
.node{display:inline-block;border:1px solid #888;border-radius:4px;padding:1px 6px;margin:2px;background:#f4f4f4}
.arrow{margin:0 2px}.path{margin:.4em 0}footer{margin-top:2em;font-size:small;color:#666})";

}  // namespace

std::string emit_html(const Report& report) {
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>Security report: " + escape(report.factory) + "</title>\n";
  h += "<style>" + std::string(kStyle) + "</style>\n</head>\n<body>\n";
  h += "<h1>Security report: " + escape(report.factory) + "</h1>\n";
  if (report.generated_at) h += "<p>Generated " + escape(*report.generated_at) + "</p>\n";
  h += "<p>" + std::to_string(report.summary.total_findings) + " findings in " +
       std::to_string(report.summary.screens_with_findings) + " screens across " +
       std::to_string(report.summary.modules_with_findings) + " modules.</p>\n";
  if (report.summary.total_findings == 0) h += "<p>No security flaws were found (0 findings).</p>\n";

  bool any_truncated = false;
  for (const auto& m : report.modules) {
    std::vector<const ReportFinding*> module_findings;
    for (const auto& s : m.screens) {
      for (const auto& f : s.findings) module_findings.push_back(&f);
    }
    h += "<details class=\"module\"><summary><b>" + escape(m.name) + "</b> &mdash; " +
         std::to_string(module_findings.size()) + " flaws, risk <span class=\"risk\">" + std::to_string(m.risk) +
         "</span> <span class=\"roles\">[" + join(roles_union(module_findings)) + "]</span></summary>\n";
    for (const auto& s : m.screens) {
      std::vector<const ReportFinding*> screen_findings;
      for (const auto& f : s.findings) {
        screen_findings.push_back(&f);
        any_truncated = any_truncated || f.truncated;
      }
      h += "<details class=\"screen\"><summary>" + escape(s.name) + " &mdash; " +
           std::to_string(s.findings.size()) + " flaws, risk <span class=\"risk\">" + std::to_string(s.risk) +
           "</span> <span class=\"roles\">[" + join(roles_union(screen_findings)) + "]</span>";
      if (s.incomplete) h += " <span class=\"notice\">analysis incomplete</span>";
      h += "</summary>\n<p>Allowed roles: " + join(s.allowed_roles) + "</p>\n";
      if (!screen_findings.empty()) render_graph(h, screen_findings);

      // Actions in first-appearance order within the (already sorted) findings.
      std::vector<std::string> actions;
      for (const auto& f : s.findings) {
        if (std::find(actions.begin(), actions.end(), f.action()) == actions.end()) actions.push_back(f.action());
      }
      for (const auto& action : actions) {
        std::vector<const ReportFinding*> action_findings;
        for (const auto& f : s.findings) {
          if (f.action() == action) action_findings.push_back(&f);
        }
        h += "<details class=\"action\"><summary>" + escape(action) + " &mdash; " +
             std::to_string(action_findings.size()) + " flaws <span class=\"roles\">[" +
             join(roles_union(action_findings)) + "]</span></summary>\n<ul>\n";
        for (const auto* f : action_findings) {
          h += "<li>" + std::string(to_string(f->mode)) + " <b>" + escape(f->entity) + "</b> by roles " +
               join(f->violating_roles) + "</li>\n";
        }
        h += "</ul>\n";
        render_graph(h, action_findings);
        h += "</details>\n";
      }
      h += "</details>\n";
    }
    h += "</details>\n";
  }
  if (any_truncated) {
    h += "<p class=\"notice\">Some call-path lists were truncated at the configured path limit.</p>\n";
  }
  h += "<footer>Risk = &Sigma; w(mode) &times; |violating roles| &times; d, with w(write)=2, w(read)=1, d=2 when a "
       "default role is exposed. This is a stand-in ranking metric, not a calibrated measure.</footer>\n";
  h += "</body>\n</html>\n";
  return h;
}

}  // namespace rbacscan
