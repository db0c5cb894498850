#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "facthist/dag.hpp"
#include "facthist/distributions.hpp"
#include "facthist/history.hpp"
#include "facthist/io.hpp"

namespace facthist {

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t iterations = 100;
  std::size_t max_factors = 4;
  std::size_t max_domain = 3;
  std::size_t sample_count = 50;
  std::size_t witness_budget = 64;
  std::size_t perturbation_budget = 16;
  std::size_t max_dag_nodes = 4;
  std::size_t max_in_degree = 2;

  /// Throws invalid_space when the bounds fall outside what the generators support.
  void validate() const;
};

struct LawTally {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;
  /// Checks whose hypothesis held, so the conclusion was actually tested.
  std::size_t exercised = 0;

  std::size_t total() const noexcept { return passed + failed + inconclusive; }
  friend bool operator==(const LawTally&, const LawTally&) = default;
};

// Aggregated pass/fail counts per law. Laws under `exploratory` are recorded but
// never count towards failure.
struct SuiteReport {
  std::map<std::string, LawTally> laws;
  std::map<std::string, LawTally> exploratory;
  std::vector<Json> counterexamples;

  LawTally& law(const std::string& name) { return laws[name]; }
  void record(const std::string& name, bool ok, bool exercised = true);
  std::size_t failures() const noexcept;
  bool passed() const noexcept { return failures() == 0; }
  void merge(const SuiteReport& other);
  Json to_json() const;
};

FactoredSpace gen_random_space(const SuiteConfig& cfg, std::uint64_t index);
/// Codomain size 1..4, table uniform over it.
RandomVariable gen_random_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index);
/// A uniformly random function of the coordinates in a random factor subset, codomain 1..4.
RandomVariable gen_local_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index);
/// Alternates between the two generators above; this is what the suites draw from.
RandomVariable gen_suite_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index);
/// Binary nodes, edges only from earlier to later nodes of a random order, in-degree capped.
Dag gen_random_dag(const SuiteConfig& cfg, std::uint64_t index);

struct SemigraphoidResult {
  bool symmetry = true;
  bool decomposition = true;
  bool weak_union = true;
  bool contraction = true;
  bool composition = true;
  // Whether each implication's hypothesis held on this instance.
  bool decomposition_exercised = false;
  bool weak_union_exercised = false;
  bool contraction_exercised = false;
  bool composition_exercised = false;

  bool all() const noexcept { return symmetry && decomposition && weak_union && contraction && composition; }
};

SemigraphoidResult check_semigraphoid(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                      const RandomVariable& z, const RandomVariable& w);

struct HistoryLawInstance {
  RandomVariable x;
  RandomVariable y;
  RandomVariable z;
  IndexSet j;               // factor subset for the removal, null and atom laws
  std::uint64_t seed = 0;   // drives the random post-composition in the monotonicity law
};

SuiteReport check_history_laws(const FactoredSpace& space, const HistoryLawInstance& inst);

SuiteReport check_duality(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& z,
                          const SuiteConfig& cfg, std::uint64_t seed);

/// Product-difference identity for every factor, on a structurally independent triple.
SuiteReport check_product_difference(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                     const RandomVariable& z, std::uint64_t seed);

struct SeparationCase {
  IndexSet j;
  bool rectangle = false;   // rectangle condition on every block
  bool separation = false;  // every disjoint J-side / J-bar-side event pair has a Z-measurable separator
  bool exhaustive = false;  // event pairs enumerated outright rather than via the per-atom reduction
};

// Compares the rectangle condition with the separation condition for every j.
// Events on the J side are unions of atoms {U_J = a, Z = z}; likewise for J-bar.
std::vector<SeparationCase> separation_cases(const FactoredSpace& space, const RandomVariable& z);
SuiteReport check_separation_characterization(const FactoredSpace& space, const RandomVariable& z);

SuiteReport run_fundamental_suite(const SuiteConfig& cfg);
SuiteReport run_semigraphoid_suite(const SuiteConfig& cfg);
SuiteReport run_history_law_suite(const SuiteConfig& cfg);
SuiteReport run_duality_suite(const SuiteConfig& cfg);
SuiteReport run_dag_suite(const SuiteConfig& cfg);

/// Fundamental theorem, semigraphoid, history laws, duality and separation, cfg.iterations instances each.
SuiteReport run_suite(const SuiteConfig& cfg);

Json config_to_json(const SuiteConfig& cfg);

}  // namespace facthist
