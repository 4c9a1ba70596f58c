#pragma once

// End-to-end analysis: index -> call graph -> candidates -> role flow.

#include <cstdint>
#include <vector>

#include "rbacscan/callgraph.hpp"
#include "rbacscan/candidates.hpp"
#include "rbacscan/factory_index.hpp"
#include "rbacscan/policy.hpp"
#include "rbacscan/roleflow.hpp"

namespace rbacscan {

struct PipelineOptions {
  AnalysisLimits limits;
  unsigned jobs = 1;
  // Keep every candidate's path list; findings carry their own path either
  // way, and large factories cannot afford the lists.
  bool keep_paths = false;
};

struct PipelineResult {
  CallGraph graph;
  std::vector<Candidate> candidates;
  std::vector<CandidateAnalysis> analyses;  // parallel to candidates
  std::int64_t graph_millis = 0;
  std::int64_t search_millis = 0;
  std::int64_t analysis_millis = 0;
};

// `index` must have been built with `policy`. Results do not depend on jobs.
PipelineResult run_pipeline(const FactoryIndex& index, const Policy& policy, const PipelineOptions& options = {});

}  // namespace rbacscan
