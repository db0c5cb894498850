#include <doctest.h>

#include <random>

#include "facthist/distributions.hpp"
#include "facthist/history.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace facthist;

namespace {

Rational q(long n, long d) { return Rational(n, d); }

// U_0 fair, P(U_1 = 1) = 1/3.
ProductDistribution skewed() { return ProductDistribution{{{q(1, 2), q(1, 2)}, {q(2, 3), q(1, 3)}}}; }

oracle::Fn coord(std::size_t i) {
  return [i](const oracle::Tuple& t) { return t[i]; };
}

const oracle::Fn kXor = [](const oracle::Tuple& t) { return (t[0] + t[1]) % 2; };
const oracle::Fn kConst = [](const oracle::Tuple&) { return std::size_t{0}; };

}  // namespace

TEST_CASE("fractions") {
  CHECK(to_fraction_string(q(2, 4)) == "1/2");
  CHECK(to_fraction_string(Rational(3)) == "3/1");
  CHECK(parse_fraction("6/8") == q(3, 4));
  CHECK(parse_fraction("1") == Rational(1));
  CHECK_THROWS_AS(parse_fraction("a/b"), Error);
  CHECK_THROWS_AS(parse_fraction("1/0"), Error);
}

TEST_CASE("uniform_product") {
  const auto s = FactoredSpace::with_domains({2, 3});
  const auto p = uniform_product(s);
  CHECK(p.per_factor[0] == std::vector<Rational>{q(1, 2), q(1, 2)});
  CHECK(p.per_factor[1] == std::vector<Rational>{q(1, 3), q(1, 3), q(1, 3)});
  const auto s22 = FactoredSpace::with_domains({2, 2});
  for (const auto& pr : outcome_probabilities(s22, uniform_product(s22))) CHECK(pr == q(1, 4));
}

TEST_CASE("sample_product is deterministic, positive and normalised") {
  const auto s = FactoredSpace::with_domains({2, 3, 4});
  CHECK(sample_product(s, 42) == sample_product(s, 42));
  CHECK_FALSE(sample_product(s, 42) == sample_product(s, 43));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = sample_product(s, seed);
    CHECK_NOTHROW(p.validate(s, true));
    for (std::size_t i = 0; i < 3; ++i) {
      Rational sum = 0;
      const auto d = s.cardinality(i);
      for (const auto& v : p.per_factor[i]) {
        CHECK(v >= Rational(1, static_cast<long>(101 * d)));
        sum += v;
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, {0}) == derive_seed(1, {0}));
  CHECK(derive_seed(1, {0}) != derive_seed(1, {1}));
  CHECK(derive_seed(1, {0}) != derive_seed(2, {0}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
}

TEST_CASE("distribution validation") {
  const auto s = FactoredSpace::with_domains({2});
  CHECK_THROWS_AS((ProductDistribution{{{q(1, 2), q(1, 3)}}}.validate(s)), Error);
  CHECK_THROWS_AS((ProductDistribution{{{q(1, 1)}}}.validate(s)), Error);
  CHECK_THROWS_AS((ProductDistribution{{{q(3, 2), q(-1, 2)}}}.validate(s)), Error);
  const ProductDistribution edge{{{Rational(1), Rational(0)}}};
  CHECK_NOTHROW(edge.validate(s));
  CHECK_THROWS_AS(edge.validate(s, true), Error);
}

TEST_CASE("outcome_prob") {
  const auto s = FactoredSpace::with_domains({2, 2});
  CHECK(outcome_prob(s, uniform_product(s), {{0, 1}}) == q(1, 4));
  const ProductDistribution p{{{q(1, 2), q(1, 2)}, {q(1, 3), q(2, 3)}}};
  CHECK(outcome_prob(s, p, {{1, 1}}) == q(1, 3));
  const auto s3 = FactoredSpace::with_domains({2, 3, 2});
  Rational total = 0;
  for (const auto& pr : outcome_probabilities(s3, sample_product(s3, 9))) total += pr;
  CHECK(total == 1);
}

TEST_CASE("cond_table") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto x = fixtures::xor_var(s);
  const auto u0 = factor_var(s, 0);
  const auto u = uniform_product(s);
  const auto diag = cond_table(s, u, x, x);
  for (const auto& [key, v] : diag) CHECK(v == (key.first == key.second ? Rational(1) : Rational(0)));
  for (const auto& [key, v] : cond_table(s, u, u0, x)) CHECK(v == q(1, 2));
  const ProductDistribution p{{{q(1, 2), q(1, 2)}, {q(2, 3), q(1, 3)}}};
  CHECK(cond_table(s, p, u0, trivial_var(s)).at({0, 1}) == q(1, 2));

  const ProductDistribution degenerate{{{Rational(1), Rational(0)}, {q(1, 2), q(1, 2)}}};
  try {
    cond_table(s, degenerate, factor_var(s, 1), u0);
    FAIL("expected degenerate-block");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_block);
  }
}

TEST_CASE("is_cond_independent examples agree with the enumeration oracle") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0), u1 = factor_var(s, 1);
  const auto x = fixtures::xor_var(s);
  const auto t = trivial_var(s);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(is_cond_independent(s, sample_product(s, seed), u0, u1, t).holds);
  }

  const auto uni = uniform_product(s);
  CHECK(is_cond_independent(s, uni, u0, x, t).holds);
  CHECK(oracle::ci_by_enumeration(uni.per_factor, coord(0), kXor, kConst));

  const auto p = skewed();
  const auto report = is_cond_independent(s, p, u0, x, t);
  CHECK_FALSE(report.holds);
  CHECK_FALSE(oracle::ci_by_enumeration(p.per_factor, coord(0), kXor, kConst));
  // P(U_0 = 1, XOR = 1) = P(1, 0) = 1/2 * 2/3
  CHECK(outcome_prob(s, p, {{1, 0}}) == q(1, 3));
  CHECK(cond_table(s, p, x, t).at({0, 1}) == q(1, 2));
  REQUIRE(report.first_violation.has_value());
  const auto& v = *report.first_violation;
  CHECK(v.joint != v.product);
}

TEST_CASE("CI verdicts match the enumeration oracle on random instances") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const auto s = FactoredSpace::with_domains({2, 1 + rng() % 3, 2});
    auto rand_var = [&](std::size_t k) {
      return RandomVariable::from_function(s, "v", k, [&](std::size_t) { return static_cast<std::uint32_t>(rng() % k); });
    };
    const auto x = rand_var(1 + rng() % 3), y = rand_var(1 + rng() % 3), z = rand_var(1 + rng() % 2);
    const auto p = (trial % 2) ? sample_product(s, trial) : uniform_product(s);
    CHECK(is_cond_independent(s, p, x, y, z).holds ==
          oracle::ci_by_enumeration(p.per_factor, oracle::table_fn(s, x), oracle::table_fn(s, y), oracle::table_fn(s, z)));
  }
}

TEST_CASE("verify_soundness") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0), u1 = factor_var(s, 1);
  const auto t = trivial_var(s);
  const auto r = verify_soundness(s, u0, u1, t, 50, 1);
  CHECK(r.samples == 50);
  CHECK(r.holds == 50);
  CHECK(r.passed());

  const auto x = fixtures::xor_var(s);
  CHECK(verify_soundness(s, t, x, x, 10, 1).holds == 10);
  CHECK(verify_soundness(s, t, u0, t, 0, 1).samples == 0);

  const auto s3 = FactoredSpace::with_domains({2, 2, 2});
  CHECK(verify_soundness(s3, factor_var(s3, 0), factor_var(s3, 1), factor_var(s3, 2), 50, 3).holds == 50);

  try {
    verify_soundness(s, u0, x, t, 5, 1);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition_not_structural);
  }
}

TEST_CASE("find_witness") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0), u1 = factor_var(s, 1);
  const auto x = fixtures::xor_var(s);
  const auto t = trivial_var(s);

  for (const auto& [a, b, z] : {std::tuple{u0, x, t}, std::tuple{u0, u1, x}, std::tuple{u0, u0, t}}) {
    const auto w = find_witness(s, a, b, z, 64, 7);
    REQUIRE(w.has_value());
    CHECK(w->tries >= 1);
    CHECK(w->tries <= 64);
    CHECK_FALSE(is_cond_independent(s, w->distribution, a, b, z).holds);
    CHECK(w->distribution.is_positive());
    CHECK(find_witness(s, a, b, z, 64, 7)->distribution == w->distribution);
  }

  try {
    find_witness(s, u0, u1, t, 4, 1);
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition_is_structural);
  }
  CHECK_FALSE(find_witness(s, u0, x, t, 0, 1).has_value());
}

TEST_CASE("perturb_factor") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u = uniform_product(s);
  const auto same = perturb_factor(s, u, 1, u.per_factor[1]);
  CHECK(same.base == same.perturbed);

  const auto pair = perturb_factor(s, u, 1, {q(1, 3), q(2, 3)});
  CHECK(outcome_probabilities(s, pair.perturbed) == std::vector<Rational>{q(1, 6), q(1, 3), q(1, 6), q(1, 3)});
  CHECK(pair.factor == 1);

  const auto base = sample_product(s, 3);
  const auto pp = perturb_factor(s, base, 0, sample_probability_vector(2, 4));
  const auto pb = outcome_probabilities(s, pp.base), pq = outcome_probabilities(s, pp.perturbed);
  for (std::size_t r = 0; r < s.outcome_count(); ++r) {
    for (std::size_t r2 = 0; r2 < s.outcome_count(); ++r2) {
      if (s.coordinate(r, 0) == s.coordinate(r2, 0)) CHECK(pq[r] / pb[r] == pq[r2] / pb[r2]);
    }
  }

  CHECK_THROWS_AS(perturb_factor(s, u, 1, {q(1, 2)}), Error);
  CHECK_THROWS_AS(perturb_factor(s, u, 1, {Rational(1), Rational(0)}), Error);
  CHECK_THROWS_AS(perturb_factor(s, u, 1, {q(1, 2), q(1, 3)}), Error);
  try {
    perturb_factor(s, u, 5, {q(1, 2), q(1, 2)});
    FAIL("expected bad-perturbation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::bad_perturbation);
  }
}

TEST_CASE("irrelevance_invariance") {
  const auto s = FactoredSpace::with_domains({2, 2});
  const auto u0 = factor_var(s, 0), u1 = factor_var(s, 1);
  const auto x = fixtures::xor_var(s);
  const auto pair = perturb_factor(s, uniform_product(s), 1, {q(1, 3), q(2, 3)});

  const auto a = irrelevance_invariance(s, pair, u0, trivial_var(s));
  CHECK(a.checked.size() == 1);
  CHECK(a.passed());

  const auto b = irrelevance_invariance(s, pair, u0, x);
  CHECK(b.checked.empty());
  CHECK(b.skipped.size() == 2);

  const auto uv = pair_var(s, u0, u1);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto pi = perturb_factor(s, sample_product(s, 5), i, sample_probability_vector(2, 6 + i));
    const auto c = irrelevance_invariance(s, pi, x, uv);
    CHECK(c.checked.size() == 4);
    CHECK(c.skipped.empty());
    CHECK(c.passed());
  }
}

TEST_CASE("product_difference_identity") {
  const auto s2 = FactoredSpace::with_domains({2, 2});
  const auto p0 = perturb_factor(s2, sample_product(s2, 1), 0, sample_probability_vector(2, 2));
  const auto a = product_difference_identity(s2, p0, factor_var(s2, 0), factor_var(s2, 1), trivial_var(s2));
  CHECK(a.passed());
  CHECK(a.cells == 4);

  const auto s3 = FactoredSpace::with_domains({2, 2, 2});
  const auto p2 = perturb_factor(s3, sample_product(s3, 1), 2, sample_probability_vector(2, 9));
  CHECK(product_difference_identity(s3, p2, factor_var(s3, 0), factor_var(s3, 1), factor_var(s3, 2)).passed());

  const auto u = uniform_product(s2);
  const auto id = perturb_factor(s2, u, 0, u.per_factor[0]);
  CHECK(product_difference_identity(s2, id, factor_var(s2, 0), factor_var(s2, 1), trivial_var(s2)).passed());

  try {
    product_difference_identity(s2, p0, factor_var(s2, 0), fixtures::xor_var(s2), trivial_var(s2));
    FAIL("expected precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition_not_structural);
  }
}

TEST_CASE("joint factorisation for a pairwise structural family") {
  const auto s = FactoredSpace::with_domains({2, 3, 2});
  const std::vector<RandomVariable> xs{factor_var(s, 0), factor_var(s, 1), factor_var(s, 2)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(is_jointly_cond_independent(s, sample_product(s, seed), xs, trivial_var(s)).holds);
  }
  const auto s2 = FactoredSpace::with_domains({2, 2});
  const std::vector<RandomVariable> triple{factor_var(s2, 0), factor_var(s2, 1), fixtures::xor_var(s2)};
  CHECK_FALSE(is_jointly_cond_independent(s2, uniform_product(s2), triple, trivial_var(s2)).holds);
}
