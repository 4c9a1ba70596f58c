#include "rbacscan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

namespace rbacscan {

namespace {

std::int64_t millis_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PipelineResult run_pipeline(const FactoryIndex& index, const Policy& policy, const PipelineOptions& options) {
  PipelineResult out;
  auto t0 = std::chrono::steady_clock::now();
  out.graph = build_call_graph(index.factory(), index);
  out.graph_millis = millis_since(t0);

  t0 = std::chrono::steady_clock::now();
  out.candidates = find_candidates(out.graph, policy, index, SearchOptions{options.limits.max_paths, options.keep_paths});
  out.search_millis = millis_since(t0);

  t0 = std::chrono::steady_clock::now();
  const RoleflowContext ctx(index, out.graph, policy, options.limits);
  out.analyses.resize(out.candidates.size());

  // Candidates come sorted by entrypoint; each run of equal entrypoints is
  // one unit of work.
  std::vector<std::size_t> groups;
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    if (i == 0 || out.candidates[i].entrypoint != out.candidates[i - 1].entrypoint) groups.push_back(i);
  }
  groups.push_back(out.candidates.size());

  // Each slot is written by exactly one worker, so the merged order is the
  // candidate order whatever the interleaving.
  std::atomic<std::size_t> next{0};
  const std::size_t group_count = groups.size() - 1;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t g = next.fetch_add(1);
      if (g >= group_count) return;
      try {
        std::vector<const Candidate*> members;
        for (std::size_t i = groups[g]; i < groups[g + 1]; ++i) members.push_back(&out.candidates[i]);
        auto results = analyze_entrypoint(ctx, members);
        for (std::size_t k = 0; k < results.size(); ++k) out.analyses[groups[g] + k] = std::move(results[k]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = group_count;
      }
    }
  };
  const unsigned jobs = std::max(1U, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.analysis_millis = millis_since(t0);
  return out;
}

}  // namespace rbacscan
