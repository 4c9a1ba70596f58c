#pragma once

// Seeded synthetic factories for benchmarks and oracle-backed tests.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard; integer ranges and fractions are derived from its raw
// 64-bit output here rather than through <random> distributions (whose
// algorithms are implementation-defined), so a seed yields the same factory
// with every conforming standard library.

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rbacscan/model.hpp"
#include "rbacscan/policy.hpp"

namespace rbacscan {

struct GenParams {
  std::uint64_t seed = 1;
  std::size_t modules = 3;
  std::size_t screens_per_module = 2;
  std::size_t actions_per_module = 4;
  std::size_t entities = 3;
  std::size_t roles = 4;  // besides the default roles
  std::size_t cfg_nodes_mean = 10;
  double guard_probability = 0.3;
  double access_probability = 0.2;
  double grant_probability = 0.05;
  std::size_t plant_flaws = 1;

  std::size_t default_roles = 2;
  double call_probability = 0.2;
  double branch_probability = 0.1;
  double loop_probability = 0.03;
  // Chance that a call targets an earlier action, closing a cycle.
  double recursion_probability = 0.0;
  // The first `library_modules` modules hold shared actions; other modules
  // only call into their own actions and the libraries. 0 = any later module.
  std::size_t library_modules = 0;
  // Hard cap per CFG; 0 = none.
  std::size_t max_cfg_nodes = 0;
  // Fraction of entities that get a policy rule.
  double policy_coverage = 1.0;
};

struct PlantedFlaw {
  std::string screen;  // qualified
  std::string entity;
  AccessMode mode = AccessMode::Read;
  std::string role;

  auto operator<=>(const PlantedFlaw&) const = default;
  bool operator==(const PlantedFlaw&) const = default;
};

struct GeneratedFactory {
  Factory factory;
  Policy policy;
  std::vector<PlantedFlaw> planted;
};

// Throws std::invalid_argument on contradictory parameters.
GeneratedFactory generate_factory(const GenParams& params);

// Hand-built law-firm mock-up: two modules, 25 screens, entities
// Client/Lawyer/LegalCase, one admin page leaking client reads.
GeneratedFactory generate_mockup();

// Named parameter sets: "B-scale" and "oracle". "mockup" is not
// parametric, see generate_mockup.
std::optional<GenParams> preset_params(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

// Another random policy over the same factory, for batch runs.
Policy generate_policy(const Factory& factory, std::uint64_t seed, double coverage = 1.0);

// Sorted, deduplicated.
std::string serialize_planted(const std::vector<PlantedFlaw>& planted);
std::vector<PlantedFlaw> parse_planted(std::string_view text);

// Small helper around mt19937_64 with portable range mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n);
  // Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbacscan
