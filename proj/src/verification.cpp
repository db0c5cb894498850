#include "facthist/verification.hpp"

#include <algorithm>
#include <iterator>
#include <random>
#include <set>
#include <unordered_map>

namespace facthist {
namespace {

// Stream tags for derive_seed; each generator draws from its own stream.
enum Stream : std::uint64_t {
  kSpaceStream = 1,
  kVariableStream,
  kLocalStream,
  kKindStream,
  kDagStream,
  kFundamentalStream,
  kSemigraphoidStream,
  kHistoryStream,
  kDualityStream,
  kSeparationStream,
};

// Variable slots within one instance.
constexpr std::uint64_t kSlots = 8;

std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(derive_seed(seed, {stream, index}));
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

RandomVariable renamed(const RandomVariable& v, const std::string& name) {
  return RandomVariable(name, v.codomain(), v.table());
}

Json instance_json(const std::string& suite, std::uint64_t instance, const SuiteConfig& cfg, const FactoredSpace& space,
                   const std::vector<std::pair<std::string, const RandomVariable*>>& vars) {
  SpaceModel model{space, {}};
  for (const auto& [name, v] : vars) model.variables.push_back(renamed(*v, name));
  Json doc;
  doc["suite"] = suite;
  doc["instance"] = instance;
  doc["config"] = config_to_json(cfg);
  doc["space"] = space_to_json(model);
  return doc;
}

// Whether x is constant on every outcome of c.
bool constant_on(const Block& c, const RandomVariable& x) {
  return std::all_of(c.outcomes.begin(), c.outcomes.end(), [&](std::size_t r) { return x(r) == x(c.outcomes.front()); });
}

bool rows_equal(const CondTable& a, const CondTable& b, std::uint32_t zv, std::size_t codomain) {
  for (std::uint32_t xv = 0; xv < codomain; ++xv) {
    if (a.at({zv, xv}) != b.at({zv, xv})) return false;
  }
  return true;
}

}  // namespace

void SuiteConfig::validate() const {
  if (max_factors < 2 || max_factors > 20) throw Error(ErrorKind::invalid_space, "max_factors must lie in 2..20");
  if (max_domain < 2) throw Error(ErrorKind::invalid_space, "max_domain must be at least 2");
  std::size_t outcomes = 1;
  for (std::size_t k = 0; k < max_factors; ++k) {
    if (outcomes > SpaceLimits{}.max_outcomes / max_domain) {
      throw Error(ErrorKind::space_too_large, "max_domain^max_factors exceeds the outcome cap");
    }
    outcomes *= max_domain;
  }
  if (max_dag_nodes < 2 || max_dag_nodes > 6) throw Error(ErrorKind::invalid_dag, "max_dag_nodes must lie in 2..6");
}

void SuiteReport::record(const std::string& name, bool ok, bool exercised) {
  auto& t = laws[name];
  (ok ? t.passed : t.failed) += 1;
  if (exercised) ++t.exercised;
}

std::size_t SuiteReport::failures() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, t] : laws) n += t.failed;
  return n;
}

void SuiteReport::merge(const SuiteReport& other) {
  auto add = [](std::map<std::string, LawTally>& into, const std::map<std::string, LawTally>& from) {
    for (const auto& [name, t] : from) {
      auto& dst = into[name];
      dst.passed += t.passed;
      dst.failed += t.failed;
      dst.inconclusive += t.inconclusive;
      dst.exercised += t.exercised;
    }
  };
  add(laws, other.laws);
  add(exploratory, other.exploratory);
  counterexamples.insert(counterexamples.end(), other.counterexamples.begin(), other.counterexamples.end());
}

Json SuiteReport::to_json() const {
  auto tallies = [](const std::map<std::string, LawTally>& m) {
    Json out = Json::object();
    for (const auto& [name, t] : m) {
      out[name] = {{"passed", t.passed}, {"failed", t.failed}, {"inconclusive", t.inconclusive}, {"exercised", t.exercised}};
    }
    return out;
  };
  Json doc;
  doc["failures"] = failures();
  doc["laws"] = tallies(laws);
  doc["exploratory"] = tallies(exploratory);
  doc["counterexamples"] = counterexamples;
  return doc;
}

Json config_to_json(const SuiteConfig& cfg) {
  return {{"seed", cfg.seed},
          {"iterations", cfg.iterations},
          {"max_factors", cfg.max_factors},
          {"max_domain", cfg.max_domain},
          {"sample_count", cfg.sample_count},
          {"witness_budget", cfg.witness_budget},
          {"perturbation_budget", cfg.perturbation_budget},
          {"max_dag_nodes", cfg.max_dag_nodes},
          {"max_in_degree", cfg.max_in_degree}};
}

// ---------------------------------------------------------------------------
// Generators

FactoredSpace gen_random_space(const SuiteConfig& cfg, std::uint64_t index) {
  auto rng = rng_for(cfg.seed, kSpaceStream, index);
  const std::size_t n = uniform(rng, 2, cfg.max_factors);
  std::vector<std::size_t> sizes(n);
  for (auto& d : sizes) d = uniform(rng, 2, cfg.max_domain);
  return FactoredSpace::with_domains(std::span<const std::size_t>(sizes));
}

RandomVariable gen_random_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index) {
  auto rng = rng_for(cfg.seed, kVariableStream, index);
  const std::size_t k = uniform(rng, 1, 4);
  return RandomVariable::from_function(space, "v" + std::to_string(index), k,
                                       [&](std::size_t) { return static_cast<std::uint32_t>(uniform(rng, 0, k - 1)); });
}

RandomVariable gen_local_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index) {
  auto rng = rng_for(cfg.seed, kLocalStream, index);
  IndexSet j;
  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    if (uniform(rng, 0, 1)) j.insert(i);
  }
  const std::size_t k = uniform(rng, 1, 4);
  // Value per J-projection, drawn the first time the projection is met in rank order.
  std::unordered_map<std::size_t, std::uint32_t> by_key;
  return RandomVariable::from_function(space, "l" + std::to_string(index), k, [&](std::size_t r) {
    const auto key = space.projection_key(r, j);
    auto it = by_key.find(key);
    if (it == by_key.end()) it = by_key.emplace(key, static_cast<std::uint32_t>(uniform(rng, 0, k - 1))).first;
    return it->second;
  });
}

RandomVariable gen_suite_variable(const FactoredSpace& space, const SuiteConfig& cfg, std::uint64_t index) {
  auto rng = rng_for(cfg.seed, kKindStream, index);
  return uniform(rng, 0, 1) ? gen_local_variable(space, cfg, index) : gen_random_variable(space, cfg, index);
}

Dag gen_random_dag(const SuiteConfig& cfg, std::uint64_t index) {
  auto rng = rng_for(cfg.seed, kDagStream, index);
  const std::size_t n = uniform(rng, 2, cfg.max_dag_nodes);
  std::vector<DagNode> nodes;
  for (std::size_t v = 0; v < n; ++v) nodes.push_back({std::string(1, static_cast<char>('A' + v)), 2});
  std::vector<std::size_t> order(n);
  for (std::size_t v = 0; v < n; ++v) order[v] = v;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t b = 1; b < n; ++b) {
    for (std::size_t a = 0; a < b; ++a) {
      const bool take = uniform(rng, 0, 1) == 1;
      if (take && indegree[order[b]] < cfg.max_in_degree) {
        edges.emplace_back(order[a], order[b]);
        ++indegree[order[b]];
      }
    }
  }
  return Dag(std::move(nodes), std::move(edges));
}

// ---------------------------------------------------------------------------
// Semigraphoid

SemigraphoidResult check_semigraphoid(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                      const RandomVariable& z, const RandomVariable& w) {
  auto indep = [&](const RandomVariable& a, const RandomVariable& b, const RandomVariable& c) {
    return structurally_independent(space, a, b, c).independent;
  };
  const auto yw = pair_var(space, y, w);
  const auto zw = pair_var(space, z, w);
  const auto zy = pair_var(space, z, y);

  const bool x_y = indep(x, y, z);
  const bool x_yw = indep(x, yw, z);
  const bool x_w = indep(x, w, z);

  SemigraphoidResult r;
  r.symmetry = x_y == indep(y, x, z);
  r.decomposition_exercised = x_yw;
  r.decomposition = !x_yw || x_y;
  r.weak_union_exercised = x_yw;
  r.weak_union = !x_yw || indep(x, y, zw);
  r.contraction_exercised = x_y && indep(x, w, zy);
  r.contraction = !r.contraction_exercised || x_yw;
  r.composition_exercised = x_y && x_w;
  r.composition = !r.composition_exercised || x_yw;
  return r;
}

// ---------------------------------------------------------------------------
// History laws

SuiteReport check_history_laws(const FactoredSpace& space, const HistoryLawInstance& inst) {
  SuiteReport rep;
  const IndexSet all = space.all_factors();
  const std::size_t n = space.factor_count();

  // Random post-composition of (y, z) for the monotonicity law.
  const auto yz = pair_var(space, inst.y, inst.z);
  std::mt19937_64 rng(inst.seed);
  const std::size_t fk = uniform(rng, 1, 3);
  std::vector<std::uint32_t> f(yz.codomain_size());
  for (auto& v : f) v = static_cast<std::uint32_t>(uniform(rng, 0, fk - 1));
  const auto fx = RandomVariable::from_function(space, "f(y,z)", fk, [&](std::size_t r) { return f[yz(r)]; });

  const auto xy = pair_var(space, inst.x, inst.y);
  const auto uj = factors_var(space, inst.j);

  for (const auto& [zv, c] : blocks_of(space, inst.z)) {
    const IndexSet hx = history(space, c, inst.x);
    const IndexSet hy = history(space, c, inst.y);

    rep.record("emptiness", hx.empty() == constant_on(c, inst.x));
    rep.record("emptiness", hy.empty() == constant_on(c, inst.y));
    rep.record("self_history", history(space, c, inst.z).empty());
    rep.record("monotonicity", history(space, c, fx).subset_of(hy));
    rep.record("compositionality", history(space, c, xy) == (hx | hy));

    const IndexSet huj = history(space, c, uj);
    rep.record("removal", history(space, c, factors_var(space, inst.j - huj)).empty());
    rep.record("null_law", !huj.empty() || (hx.disjoint(inst.j) && hy.disjoint(inst.j)), huj.empty());

    const auto atoms = disintegration_atoms(space, c);
    const bool j_rect = is_rectangle(space, c, inst.j);
    rep.record("atom_law", !j_rect || huj == inst.j - atoms.trivial_part, j_rect);

    rep.record("fast_path", history_from_atoms(space, c, atoms, inst.x) == hx);
    rep.record("fast_path", history_from_atoms(space, c, atoms, inst.y) == hy);

    // Full subset enumeration on this block.
    std::vector<bool> rect(std::size_t{1} << n), gen(std::size_t{1} << n);
    for_each_subset(all, [&](IndexSet s) {
      rect[s.bits()] = is_rectangle(space, c, s);
      gen[s.bits()] = rect[s.bits()] && determines(space, c, s, inst.x);
    });

    bool sym = true, field = true, closed = true, char_ok = true;
    IndexSet meet = all;
    std::size_t min_card = n + 1;
    for (std::uint64_t a = 0; a < rect.size(); ++a) {
      const IndexSet sa(a);
      if (rect[a] != rect[sa.complement(n).bits()]) sym = false;
      if (gen[a]) {
        meet = meet & sa;
        min_card = std::min(min_card, sa.size());
      }
      // j is a rectangle set iff its non-trivial part is a union of atoms.
      const IndexSet core = sa - atoms.trivial_part;
      IndexSet rebuilt;
      for (const auto& atom : atoms.atoms) {
        if (!atom.disjoint(core)) rebuilt = rebuilt | atom;
      }
      if (rect[a] != (rebuilt == core)) char_ok = false;
      for (std::uint64_t b = 0; b < rect.size(); ++b) {
        if (rect[a] && rect[b] && (!rect[a & b] || !rect[a | b])) field = false;
        if (gen[a] && gen[b] && !gen[a & b]) closed = false;
      }
    }
    rep.record("rectangle_symmetry", sym);
    rep.record("rectangle_field", field);
    rep.record("generation_intersection_closure", closed);
    rep.record("history_is_meet_of_generating_sets", meet == hx);
    bool min_ok = true;
    for (std::uint64_t a = 0; a < gen.size(); ++a) {
      if (gen[a] && IndexSet(a).size() == min_card && IndexSet(a) != hx) min_ok = false;
    }
    rep.record("minimum_cardinality_is_history", min_ok);
    bool minimal = gen[hx.bits()];
    for (auto i : hx.ids()) {
      if (gen[(hx - IndexSet::single(i)).bits()]) minimal = false;
    }
    rep.record("history_minimality", minimal);
    rep.record("atoms_characterize_rectangles", char_ok);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Duality and perturbations

SuiteReport check_duality(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& z,
                          const SuiteConfig& cfg, std::uint64_t seed) {
  SuiteReport rep;
  const auto base = sample_product(space, derive_seed(seed, {0}));
  const auto hist = conditional_history(space, x, z);
  const auto before = cond_table(space, base, x, z);

  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    std::map<std::uint32_t, bool> changed;
    for (std::size_t k = 0; k < cfg.perturbation_budget; ++k) {
      auto v = sample_probability_vector(space.cardinality(i), derive_seed(seed, {1, i, k}));
      const auto pair = perturb_factor(space, base, i, std::move(v));
      if (k == 0) {
        // The library check and the table comparison below must agree.
        const auto inv = irrelevance_invariance(space, pair, x, z);
        rep.record("duality.irrelevance_report", inv.passed(), !inv.checked.empty());
      }
      const auto after = cond_table(space, pair.perturbed, x, z);
      for (const auto& [zv, h] : hist.per_block) {
        if (!rows_equal(before, after, zv, x.codomain_size())) changed[zv] = true;
      }
    }
    for (const auto& [zv, h] : hist.per_block) {
      const bool moved = changed.count(zv) != 0;
      if (!h.contains(i)) {
        rep.record("duality.irrelevance", !moved);
      } else if (moved) {
        rep.record("duality.maximality", true);
      } else {
        ++rep.law("duality.maximality").inconclusive;
      }
    }
  }
  return rep;
}

SuiteReport check_product_difference(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                     const RandomVariable& z, std::uint64_t seed) {
  SuiteReport rep;
  const auto base = sample_product(space, derive_seed(seed, {0}));
  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    auto v = sample_probability_vector(space.cardinality(i), derive_seed(seed, {1, i}));
    const auto pair = perturb_factor(space, base, i, std::move(v));
    rep.record("product_difference", product_difference_identity(space, pair, x, y, z).passed());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Separation characterisation (exploratory)

std::vector<SeparationCase> separation_cases(const FactoredSpace& space, const RandomVariable& z) {
  constexpr std::size_t kExhaustiveAtoms = 14;
  const auto blocks = blocks_of(space, z);
  const std::size_t n = space.factor_count();
  std::vector<SeparationCase> out;
  for_each_subset(space.all_factors(), [&](IndexSet j) {
    const IndexSet jbar = j.complement(n);
    SeparationCase sc{j, true, true, false};
    // Atoms of the two event families: (block, projection key) with their outcomes.
    struct Atom {
      std::uint32_t block;
      std::vector<std::size_t> outcomes;
    };
    std::vector<Atom> left, right;
    for (const auto& [zv, c] : blocks) {
      sc.rectangle = sc.rectangle && is_rectangle(space, c, j);
      std::map<std::size_t, std::vector<std::size_t>> lk, rk;
      for (auto r : c.outcomes) {
        lk[space.projection_key(r, j)].push_back(r);
        rk[space.projection_key(r, jbar)].push_back(r);
      }
      for (auto& [_, o] : lk) left.push_back({zv, std::move(o)});
      for (auto& [_, o] : rk) right.push_back({zv, std::move(o)});
    }
    sc.exhaustive = left.size() + right.size() <= kExhaustiveAtoms;
    if (sc.exhaustive) {
      // Every A (union of left atoms) and B (union of right atoms) with A, B disjoint
      // needs a union of blocks containing A and missing B: no block may meet both.
      const std::size_t total = space.outcome_count();
      auto to_bits = [&](const std::vector<Atom>& atoms, std::uint64_t mask) {
        std::vector<bool> bits(total, false);
        std::set<std::uint32_t> touched;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          if (!(mask >> k & 1)) continue;
          touched.insert(atoms[k].block);
          for (auto r : atoms[k].outcomes) bits[r] = true;
        }
        return std::make_pair(std::move(bits), std::move(touched));
      };
      for (std::uint64_t a = 1; a < (std::uint64_t{1} << left.size()) && sc.separation; ++a) {
        const auto [abits, ablocks] = to_bits(left, a);
        for (std::uint64_t b = 1; b < (std::uint64_t{1} << right.size()); ++b) {
          const auto [bbits, bblocks] = to_bits(right, b);
          bool disjoint = true;
          for (std::size_t r = 0; r < total && disjoint; ++r) disjoint = !(abits[r] && bbits[r]);
          if (!disjoint) continue;
          const bool shared = std::any_of(ablocks.begin(), ablocks.end(), [&](std::uint32_t v) { return bblocks.count(v) != 0; });
          if (shared) {
            sc.separation = false;
            break;
          }
        }
      }
    } else {
      // Shrinking A and B to single atoms preserves disjointness, so a violation
      // exists iff two atoms of the same block have empty intersection.
      for (const auto& la : left) {
        for (const auto& ra : right) {
          if (la.block != ra.block) continue;
          std::vector<std::size_t> both;
          std::set_intersection(la.outcomes.begin(), la.outcomes.end(), ra.outcomes.begin(), ra.outcomes.end(),
                                std::back_inserter(both));
          if (both.empty()) sc.separation = false;
        }
      }
    }
    out.push_back(sc);
  });
  return out;
}

SuiteReport check_separation_characterization(const FactoredSpace& space, const RandomVariable& z) {
  SuiteReport rep;
  for (const auto& sc : separation_cases(space, z)) {
    auto& t = rep.exploratory[sc.exhaustive ? "separation.exhaustive" : "separation.atom_pairs"];
    (sc.rectangle == sc.separation ? t.passed : t.failed) += 1;
    if (sc.rectangle) ++t.exercised;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Suites

SuiteReport run_fundamental_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto space = gen_random_space(cfg, it);
    const auto x = gen_suite_variable(space, cfg, it * kSlots + 0);
    const auto y = gen_suite_variable(space, cfg, it * kSlots + 1);
    const auto z = gen_suite_variable(space, cfg, it * kSlots + 2);
    const auto w = gen_suite_variable(space, cfg, it * kSlots + 3);
    const std::uint64_t seed = derive_seed(cfg.seed, {kFundamentalStream, it});

    const auto verdict = structurally_independent(space, x, y, z);
    if (verdict.independent) {
      const auto s = verify_soundness(space, x, y, z, cfg.sample_count, seed);
      rep.record("soundness", s.passed());
      if (!s.passed()) {
        auto doc = instance_json("fundamental", it, cfg, space, {{"x", &x}, {"y", &y}, {"z", &z}});
        doc["law"] = "soundness";
        doc["sample_seed"] = derive_seed(seed, {s.violations.front().first});
        rep.counterexamples.push_back(std::move(doc));
      }
    } else {
      auto found = find_witness(space, x, y, z, cfg.witness_budget, seed);
      if (found) {
        rep.record("completeness", true);
      } else {
        found = find_witness(space, x, y, z, cfg.witness_budget, derive_seed(seed, {1}));
        if (found) {
          ++rep.law("completeness").inconclusive;
        } else {
          rep.record("completeness", false);
          auto doc = instance_json("fundamental", it, cfg, space, {{"x", &x}, {"y", &y}, {"z", &z}});
          doc["law"] = "completeness";
          doc["witness_seeds"] = {seed, derive_seed(seed, {1})};
          rep.counterexamples.push_back(std::move(doc));
        }
      }
    }

    // Pairwise structural independence of (x, y, w) implies joint factorisation.
    const bool pairwise = verdict.independent && structurally_independent(space, x, w, z).independent &&
                          structurally_independent(space, y, w, z).independent;
    if (pairwise) {
      const std::vector<RandomVariable> family{x, y, w};
      bool ok = true;
      for (std::size_t k = 0; k < cfg.sample_count && ok; ++k) {
        ok = is_jointly_cond_independent(space, sample_product(space, derive_seed(seed, {2, k})), family, z).holds;
      }
      rep.record("vector_theorem", ok);
      if (!ok) {
        auto doc = instance_json("fundamental", it, cfg, space, {{"x", &x}, {"y", &y}, {"w", &w}, {"z", &z}});
        doc["law"] = "vector_theorem";
        rep.counterexamples.push_back(std::move(doc));
      }
    }
    // The factor projections themselves are pairwise structurally independent.
    {
      std::vector<RandomVariable> family;
      for (std::size_t i = 0; i < space.factor_count(); ++i) {
        family.push_back(factor_var(space, i));
      }
      bool ok = true;
      for (std::size_t k = 0; k < std::min<std::size_t>(cfg.sample_count, 5) && ok; ++k) {
        ok = is_jointly_cond_independent(space, sample_product(space, derive_seed(seed, {3, k})), family,
                                         trivial_var(space))
                 .holds;
      }
      rep.record("vector_theorem.factor_family", ok);
    }
  }
  return rep;
}

SuiteReport run_semigraphoid_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  SuiteConfig local = cfg;
  local.seed = derive_seed(cfg.seed, {kSemigraphoidStream});
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto space = gen_random_space(local, it);
    const auto x = gen_suite_variable(space, local, it * kSlots + 0);
    const auto y = gen_suite_variable(space, local, it * kSlots + 1);
    const auto z = gen_suite_variable(space, local, it * kSlots + 2);
    const auto w = gen_suite_variable(space, local, it * kSlots + 3);
    const auto r = check_semigraphoid(space, x, y, z, w);
    rep.record("semigraphoid.symmetry", r.symmetry);
    rep.record("semigraphoid.decomposition", r.decomposition, r.decomposition_exercised);
    rep.record("semigraphoid.weak_union", r.weak_union, r.weak_union_exercised);
    rep.record("semigraphoid.contraction", r.contraction, r.contraction_exercised);
    rep.record("semigraphoid.composition", r.composition, r.composition_exercised);
    if (!r.all()) {
      auto doc = instance_json("semigraphoid", it, local, space, {{"x", &x}, {"y", &y}, {"z", &z}, {"w", &w}});
      doc["axioms"] = {{"symmetry", r.symmetry},
                       {"decomposition", r.decomposition},
                       {"weak_union", r.weak_union},
                       {"contraction", r.contraction},
                       {"composition", r.composition}};
      rep.counterexamples.push_back(std::move(doc));
    }
  }
  return rep;
}

SuiteReport run_history_law_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  SuiteConfig local = cfg;
  local.seed = derive_seed(cfg.seed, {kHistoryStream});
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto space = gen_random_space(local, it);
    auto rng = rng_for(local.seed, kHistoryStream, it);
    IndexSet j;
    for (std::size_t i = 0; i < space.factor_count(); ++i) {
      if (uniform(rng, 0, 1)) j.insert(i);
    }
    HistoryLawInstance inst{gen_suite_variable(space, local, it * kSlots + 0),
                            gen_suite_variable(space, local, it * kSlots + 1),
                            gen_suite_variable(space, local, it * kSlots + 2), j, rng()};
    auto r = check_history_laws(space, inst);
    if (!r.passed()) {
      auto doc = instance_json("history_laws", it, local, space, {{"x", &inst.x}, {"y", &inst.y}, {"z", &inst.z}});
      doc["j"] = j.ids();
      doc["composition_seed"] = inst.seed;
      Json failed = Json::array();
      for (const auto& [name, t] : r.laws) {
        if (t.failed) failed.push_back(name);
      }
      doc["laws"] = failed;
      r.counterexamples.push_back(std::move(doc));
    }
    rep.merge(r);
  }
  return rep;
}

SuiteReport run_duality_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  SuiteConfig local = cfg;
  local.seed = derive_seed(cfg.seed, {kDualityStream});
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto space = gen_random_space(local, it);
    const auto x = gen_suite_variable(space, local, it * kSlots + 0);
    const auto y = gen_suite_variable(space, local, it * kSlots + 1);
    const auto z = gen_suite_variable(space, local, it * kSlots + 2);
    const std::uint64_t seed = derive_seed(local.seed, {kDualityStream, it});

    auto r = check_duality(space, x, z, local, seed);
    if (structurally_independent(space, x, y, z).independent) {
      r.merge(check_product_difference(space, x, y, z, derive_seed(seed, {7})));
    }
    // Variables local to complementary factor groups are structurally independent.
    auto rng = rng_for(local.seed, kDualityStream, it);
    IndexSet j;
    for (std::size_t i = 0; i < space.factor_count(); ++i) {
      if (uniform(rng, 0, 1)) j.insert(i);
    }
    const auto a = factors_var(space, j);
    const auto b = factors_var(space, j.complement(space.factor_count()));
    r.merge(check_product_difference(space, a, b, trivial_var(space), derive_seed(seed, {8})));

    if (!r.passed()) {
      auto doc = instance_json("duality", it, local, space, {{"x", &x}, {"y", &y}, {"z", &z}});
      doc["perturbation_seed"] = seed;
      doc["j"] = j.ids();
      r.counterexamples.push_back(std::move(doc));
    }
    rep.merge(r);
  }
  return rep;
}

SuiteReport run_dag_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto dag = gen_random_dag(cfg, it);
    const auto emb = embed_dag(dag);
    const auto eq = dsep_structural_equivalence(dag, emb, all_single_node_queries(dag));
    for (const auto& c : eq.results) rep.record("dsep_equivalence", c.agrees(), c.d_separated);
    const auto st = structural_time_vs_ancestry(dag, emb);
    for (std::size_t v = 0; v < dag.size(); ++v) {
      const bool ok = std::find(st.history_mismatches.begin(), st.history_mismatches.end(), v) == st.history_mismatches.end();
      rep.record("structural_time.history", ok);
    }
    const std::size_t pairs = dag.size() * dag.size();
    const std::size_t bad_pairs = st.order_mismatches.size();
    for (std::size_t k = 0; k < pairs; ++k) rep.record("structural_time.order", k < pairs - bad_pairs);
    if (eq.disagreements() != 0 || !st.passed()) {
      Json doc;
      doc["suite"] = "dag";
      doc["instance"] = it;
      doc["config"] = config_to_json(cfg);
      doc["dag"] = dag_to_json(dag);
      Json bad = Json::array();
      for (const auto& c : eq.results) {
        if (c.agrees()) continue;
        Json given = Json::array();
        for (auto g : c.query.given) given.push_back(dag.node(g).name);
        bad.push_back({{"x", dag.node(c.query.x).name},
                       {"y", dag.node(c.query.y).name},
                       {"given", given},
                       {"d_separated", c.d_separated},
                       {"structural", c.structural}});
      }
      doc["disagreements"] = bad;
      rep.counterexamples.push_back(std::move(doc));
    }
  }
  return rep;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  if (cfg.iterations == 0) return rep;
  rep.merge(run_fundamental_suite(cfg));
  rep.merge(run_semigraphoid_suite(cfg));
  rep.merge(run_history_law_suite(cfg));
  rep.merge(run_duality_suite(cfg));
  SuiteConfig local = cfg;
  local.seed = derive_seed(cfg.seed, {kSeparationStream});
  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    const auto space = gen_random_space(local, it);
    rep.merge(check_separation_characterization(space, gen_suite_variable(space, local, it * kSlots)));
  }
  return rep;
}

}  // namespace facthist
