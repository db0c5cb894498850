#include <doctest.h>

#include <random>

#include "facthist/history.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace facthist;

namespace {

RandomVariable random_var(const FactoredSpace& s, std::mt19937_64& rng) {
  const std::size_t k = 1 + rng() % 4;
  return RandomVariable::from_function(s, "r", k, [&](std::size_t) { return static_cast<std::uint32_t>(rng() % k); });
}

// A random function of a random subset of the factors.
RandomVariable local_var(const FactoredSpace& s, std::mt19937_64& rng) {
  const IndexSet j(rng() & ((std::uint64_t{1} << s.factor_count()) - 1));
  const std::size_t k = 1 + rng() % 3;
  std::map<std::size_t, std::uint32_t> by_key;
  return RandomVariable::from_function(s, "l", k, [&](std::size_t r) {
    auto [it, fresh] = by_key.emplace(s.projection_key(r, j), 0);
    if (fresh) it->second = static_cast<std::uint32_t>(rng() % k);
    return it->second;
  });
}

FactoredSpace random_space(std::mt19937_64& rng) {
  std::vector<std::size_t> sizes(1 + rng() % 4);
  for (auto& d : sizes) d = 1 + rng() % 3;
  return FactoredSpace::with_domains(std::span<const std::size_t>(sizes));
}

}  // namespace

TEST_CASE("is_rectangle") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto omega = whole_space(s);
  for_each_subset(s.all_factors(), [&](IndexSet j) { CHECK(is_rectangle(s, omega, j)); });
  const auto c = fixtures::xor_block(s, 0);
  CHECK(is_rectangle(s, c, IndexSet{}));
  CHECK(is_rectangle(s, c, s.all_factors()));
  CHECK_FALSE(is_rectangle(s, c, IndexSet{0}));
  CHECK_FALSE(is_rectangle(s, c, IndexSet{1}));
}

TEST_CASE("determines") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto omega = whole_space(s);
  const auto x = fixtures::xor_var(s);
  CHECK(determines(s, omega, IndexSet{0}, factor_var(s, 0)));
  CHECK_FALSE(determines(s, omega, IndexSet{0}, x));
  CHECK(determines(s, fixtures::xor_block(s, 0), IndexSet{}, x));
}

TEST_CASE("generates") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto c = fixtures::xor_block(s, 0);
  const auto u0 = factor_var(s, 0);
  CHECK(generates(s, c, s.all_factors(), u0));
  CHECK(generates(s, c, s.all_factors(), fixtures::xor_var(s)));
  CHECK_FALSE(generates(s, c, IndexSet{0}, u0));
  CHECK(generates(s, c, IndexSet{0, 1}, u0));
}

TEST_CASE("history examples agree with the oracle") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto x = fixtures::xor_var(s);
  const auto u0 = factor_var(s, 0);
  const auto omega = whole_space(s);
  const auto c0 = fixtures::xor_block(s, 0);

  for (auto method : {HistoryMethod::enumeration, HistoryMethod::atoms}) {
    CHECK(history(s, c0, x, method) == IndexSet{});
    CHECK(history(s, omega, x, method) == IndexSet{0, 1});
    CHECK(history(s, c0, u0, method) == IndexSet{0, 1});
    CHECK(history(s, omega, u0, method) == IndexSet{0});
  }

  const auto all = oracle::block_tuples(s, trivial_var(s), 0);
  CHECK(*oracle::history(all, 2, oracle::table_fn(s, x)) == std::set<std::size_t>{0, 1});
  CHECK(*oracle::history(all, 2, oracle::table_fn(s, u0)) == std::set<std::size_t>{0});
  const auto xor0 = oracle::block_tuples(s, x, 0);
  CHECK(*oracle::history(xor0, 2, oracle::table_fn(s, u0)) == std::set<std::size_t>{0, 1});
  CHECK(oracle::history(xor0, 2, oracle::table_fn(s, x))->empty());
}

TEST_CASE("history matches the literal oracle on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = random_space(rng);
    const auto x = (trial % 2) ? random_var(s, rng) : local_var(s, rng);
    const auto z = (trial % 3) ? random_var(s, rng) : local_var(s, rng);
    for (const auto& [zv, block] : blocks_of(s, z)) {
      const auto tuples = oracle::block_tuples(s, z, zv);
      const auto expected = oracle::history(tuples, s.factor_count(), oracle::table_fn(s, x));
      REQUIRE(expected.has_value());
      const auto h = history(s, block, x, HistoryMethod::enumeration);
      CHECK(oracle::to_set(h) == *expected);
      CHECK(history(s, block, x, HistoryMethod::atoms) == h);
      CHECK(history_from_atoms(s, block, disintegration_atoms(s, block), x) == h);
      // generation agrees with the literal definition for every j
      for_each_subset(s.all_factors(), [&](IndexSet j) {
        std::vector<bool> in_j(s.factor_count());
        for (auto i : j.ids()) in_j[i] = true;
        CHECK(generates(s, block, j, x) == oracle::generates(tuples, in_j, oracle::table_fn(s, x)));
      });
    }
  }
}

TEST_CASE("history postcondition: result generates and no smaller subset does") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = random_space(rng);
    const auto x = random_var(s, rng);
    const auto z = local_var(s, rng);
    for (const auto& [zv, block] : blocks_of(s, z)) {
      const auto h = history(s, block, x);
      CHECK(generates(s, block, h, x));
      for (auto i : h.ids()) {
        auto smaller = h;
        smaller.erase(i);
        CHECK_FALSE(generates(s, block, smaller, x));
      }
    }
  }
}

TEST_CASE("single-outcome blocks and unit factors") {
  const auto s = FactoredSpace::with_domains({2, 1, 3});
  const auto id = tuple_var(s, std::vector<RandomVariable>{factor_var(s, 0), factor_var(s, 1), factor_var(s, 2)});
  const auto x = RandomVariable::from_function(s, "x", 2, [&](std::size_t r) { return static_cast<std::uint32_t>(r % 2); });
  for (const auto& [zv, block] : blocks_of(s, id)) {
    CHECK(block.size() == 1);
    CHECK(history(s, block, x) == IndexSet{});
  }
  const auto h = history(s, whole_space(s), x);
  CHECK_FALSE(h.contains(1));
  CHECK(disintegration_atoms(s, whole_space(s)).trivial_part == IndexSet{1});
}

TEST_CASE("conditional_history") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0);
  const auto x = fixtures::xor_var(s);
  const auto triv = conditional_history(s, u0, trivial_var(s));
  REQUIRE(triv.per_block.size() == 1);
  CHECK(triv.per_block.at(0) == IndexSet{0});

  const auto given_xor = conditional_history(s, u0, x);
  CHECK(given_xor.per_block.at(0) == IndexSet{0, 1});
  CHECK(given_xor.per_block.at(1) == IndexSet{0, 1});

  for (const auto& [zv, h] : conditional_history(s, x, x).per_block) CHECK(h.size() == 0);
}

TEST_CASE("structurally_independent") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0), u1 = factor_var(s, 1);
  const auto x = fixtures::xor_var(s);
  const auto t = trivial_var(s);

  const auto a = structurally_independent(s, u0, u1, t);
  CHECK(a.independent);
  CHECK(a.overlaps.empty());

  const auto b = structurally_independent(s, u0, x, t);
  CHECK_FALSE(b.independent);
  CHECK(b.overlaps.at(0) == IndexSet{0});

  const auto c = structurally_independent(s, u0, u1, x);
  CHECK_FALSE(c.independent);
  CHECK(c.overlaps.at(0) == IndexSet{0, 1});
  CHECK(c.overlaps.at(1) == IndexSet{0, 1});

  for (auto m : {HistoryMethod::enumeration, HistoryMethod::atoms}) {
    CHECK(structurally_independent(s, u0, u1, t, m).independent);
    CHECK_FALSE(structurally_independent(s, u0, u1, x, m).independent);
  }
  const auto other = FactoredSpace::with_domains({3});
  CHECK_THROWS_AS(structurally_independent(s, u0, factor_var(other, 0), t), Error);
}

TEST_CASE("disintegration_atoms") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto full = disintegration_atoms(s, whole_space(s));
  CHECK(full.atoms == std::vector<IndexSet>{IndexSet{0}, IndexSet{1}});
  CHECK(full.trivial_part == IndexSet{});

  const auto xor0 = disintegration_atoms(s, fixtures::xor_block(s, 0));
  CHECK(xor0.atoms == std::vector<IndexSet>{IndexSet{0, 1}});
  CHECK(xor0.trivial_part == IndexSet{});

  const auto s3 = FactoredSpace::with_domains({2, 2, 2});
  const auto c = blocks_of(s3, factor_var(s3, 0)).at(0);
  const auto d = disintegration_atoms(s3, c);
  CHECK(d.atoms == std::vector<IndexSet>{IndexSet{1}, IndexSet{2}});
  CHECK(d.trivial_part == IndexSet{0});

  const auto unit = FactoredSpace::with_domains({1, 3});
  CHECK(disintegration_atoms(unit, whole_space(unit)).trivial_part == IndexSet{0});
}

TEST_CASE("rectangle index sets are exactly unions of atoms plus trivial factors") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 80; ++trial) {
    const auto s = random_space(rng);
    const auto z = (trial % 2) ? random_var(s, rng) : local_var(s, rng);
    for (const auto& [zv, block] : blocks_of(s, z)) {
      const auto d = disintegration_atoms(s, block);
      IndexSet covered = d.trivial_part;
      for (auto a : d.atoms) {
        CHECK(a.disjoint(covered));
        covered = covered | a;
      }
      CHECK(covered == s.all_factors());
      for_each_subset(s.all_factors(), [&](IndexSet j) {
        const bool union_of_atoms = std::all_of(d.atoms.begin(), d.atoms.end(), [&](IndexSet a) {
          return a.subset_of(j) || a.disjoint(j);
        });
        CHECK(is_rectangle(s, block, j) == union_of_atoms);
        CHECK(is_rectangle(s, block, j) == is_rectangle(s, block, j.complement(s.factor_count())));
      });
    }
  }
}

TEST_CASE("generating sets are closed under intersection and their meet is the history") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = random_space(rng);
    const auto x = local_var(s, rng);
    const auto z = random_var(s, rng);
    for (const auto& [zv, block] : blocks_of(s, z)) {
      std::vector<IndexSet> gen;
      for_each_subset(s.all_factors(), [&](IndexSet j) {
        if (generates(s, block, j, x)) gen.push_back(j);
      });
      IndexSet meet = s.all_factors();
      std::size_t min_size = s.factor_count();
      for (auto j : gen) {
        meet = meet & j;
        min_size = std::min(min_size, j.size());
        for (auto k : gen) CHECK(generates(s, block, j & k, x));
      }
      const auto h = history(s, block, x);
      CHECK(meet == h);
      for (auto j : gen) {
        if (j.size() == min_size) CHECK(j == h);
      }
    }
  }
}

TEST_CASE("monotonicity and compositionality") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = random_space(rng);
    const auto x = random_var(s, rng);
    const auto y = local_var(s, rng);
    const auto z = local_var(s, rng);
    const auto hx = conditional_history(s, x, z);
    const auto hy = conditional_history(s, y, z);
    const auto hxy = conditional_history(s, pair_var(s, x, y), z);
    for (const auto& [zv, h] : hxy.per_block) CHECK(h == (hx.per_block.at(zv) | hy.per_block.at(zv)));

    // f(y, z) has history inside H(y) on every block
    const auto yz = pair_var(s, y, z);
    std::vector<std::uint32_t> img(yz.codomain_size());
    for (auto& v : img) v = static_cast<std::uint32_t>(rng() % 3);
    const auto f = RandomVariable::from_function(s, "f", 3, [&](std::size_t r) { return img[yz(r)]; });
    CHECK(structural_time_leq(s, f, y, z));
  }
}

TEST_CASE("structural_time_leq") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0);
  const auto x = fixtures::xor_var(s);
  const auto t = trivial_var(s);
  CHECK(structural_time_leq(s, x, x, t));
  CHECK(structural_time_leq(s, t, x, t));
  CHECK(structural_time_leq(s, u0, x, t));
  CHECK_FALSE(structural_time_leq(s, x, u0, t));
}
