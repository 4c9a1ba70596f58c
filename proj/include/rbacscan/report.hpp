#pragma once

// Findings grouped module -> screen -> action and ranked by risk.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rbacscan/callgraph.hpp"
#include "rbacscan/candidates.hpp"
#include "rbacscan/factory_index.hpp"
#include "rbacscan/roleflow.hpp"

namespace rbacscan {

struct ReportFinding {
  std::string entity;
  AccessMode mode = AccessMode::Read;
  std::set<std::string> violating_roles;
  std::vector<std::string> call_path;  // call-graph node labels
  std::vector<WitnessStep> witness;
  bool truncated = false;

  // Routine that performs the access (last witness step).
  std::string action() const { return witness.empty() ? std::string{} : witness.back().container; }

  bool operator==(const ReportFinding&) const = default;
};

struct ScreenEntry {
  std::string name;
  std::int64_t risk = 0;
  std::set<std::string> allowed_roles;
  bool incomplete = false;
  std::vector<ReportFinding> findings;

  bool operator==(const ScreenEntry&) const = default;
};

struct ModuleEntry {
  std::string name;
  std::int64_t risk = 0;
  std::vector<ScreenEntry> screens;

  bool operator==(const ModuleEntry&) const = default;
};

struct ReportSummary {
  std::size_t modules_with_findings = 0;
  std::size_t screens_with_findings = 0;
  std::size_t total_findings = 0;

  bool operator==(const ReportSummary&) const = default;
};

struct Report {
  std::string factory;
  ReportSummary summary;
  std::vector<ModuleEntry> modules;
  std::optional<std::string> generated_at;  // only with --timestamp

  bool operator==(const Report&) const = default;
};

// Σ w(mode) × |violating roles| × d with w(write)=2, w(read)=1 and d=2 when a
// violating role is a default role. Made up: there is no published metric.
std::int64_t risk_score(const std::vector<ReportFinding>& findings, const std::set<std::string>& default_roles);
std::int64_t risk_score(const ScreenEntry& screen, const std::set<std::string>& default_roles);

// `analyses[i]` belongs to `candidates[i]`. Candidates without findings are
// dropped unless their analysis was incomplete.
Report build_report(const FactoryIndex& index, const CallGraph& graph, const std::vector<Candidate>& candidates,
                    const std::vector<CandidateAnalysis>& analyses);

std::string emit_json(const Report& report);
// Throws ParseError.
Report parse_report_json(std::string_view text);
std::string emit_html(const Report& report);

}  // namespace rbacscan
