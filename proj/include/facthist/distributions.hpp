#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "facthist/history.hpp"
#include "facthist/space.hpp"

namespace facthist {

using Rational = mpq_class;

/// "num/den" in lowest terms; integers are written with denominator 1.
std::string to_fraction_string(const Rational& q);
/// Accepts "num/den" or an integer. Throws parse_error.
Rational parse_fraction(const std::string& text);

// An independent product measure: one probability vector per factor.
struct ProductDistribution {
  std::vector<std::vector<Rational>> per_factor;

  bool is_positive() const;
  /// Throws bad_distribution unless shapes match the space and each vector is a probability vector.
  void validate(const FactoredSpace& space, bool require_positive = false) const;

  friend bool operator==(const ProductDistribution&, const ProductDistribution&) = default;
};

/// A base distribution and a copy with exactly one factor's vector replaced.
struct PerturbationPair {
  ProductDistribution base;
  ProductDistribution perturbed;
  std::size_t factor = 0;
};

struct CiViolation {
  std::uint32_t z = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  Rational joint;    // P(x, y | z)
  Rational product;  // P(x | z) P(y | z)
};

struct CiReport {
  bool holds = true;
  std::optional<CiViolation> first_violation;
};

/// (z value, x value) -> P(x | z). Every attained z has a full row over x's codomain.
using CondTable = std::map<std::pair<std::uint32_t, std::uint32_t>, Rational>;

/// Derives a per-stream seed from a master seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

ProductDistribution uniform_product(const FactoredSpace& space);

// Numerators drawn uniformly from 1..101, each vector normalised by its sum.
ProductDistribution sample_product(const FactoredSpace& space, std::uint64_t seed);

/// One positive probability vector of length d on the same grid as sample_product.
std::vector<Rational> sample_probability_vector(std::size_t d, std::uint64_t seed);

Rational outcome_prob(const FactoredSpace& space, const ProductDistribution& p, const Outcome& o);
/// Probability of every outcome, indexed by rank.
std::vector<Rational> outcome_probabilities(const FactoredSpace& space, const ProductDistribution& p);

CondTable cond_table(const FactoredSpace& space, const ProductDistribution& p, const RandomVariable& x,
                     const RandomVariable& z);

CiReport is_cond_independent(const FactoredSpace& space, const ProductDistribution& p, const RandomVariable& x,
                             const RandomVariable& y, const RandomVariable& z);

/// Joint factorisation P(x_1..x_n | z) = prod_k P(x_k | z) for a family of variables.
CiReport is_jointly_cond_independent(const FactoredSpace& space, const ProductDistribution& p,
                                     std::span<const RandomVariable> xs, const RandomVariable& z);

struct SoundnessReport {
  std::size_t samples = 0;
  std::size_t holds = 0;
  std::vector<std::pair<std::size_t, CiViolation>> violations;  // (sample index, violation)
  bool passed() const noexcept { return violations.empty(); }
};

/// CI must hold for every sampled product distribution. Requires structural independence.
SoundnessReport verify_soundness(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                 const RandomVariable& z, std::size_t samples, std::uint64_t seed);

struct Witness {
  ProductDistribution distribution;
  std::size_t tries = 0;  // samples drawn, including the witness
  CiViolation violation;
};

// First sampled positive distribution under which CI fails. Exact arithmetic makes
// any returned witness a proof of dependence. Requires structural dependence.
std::optional<Witness> find_witness(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                    const RandomVariable& z, std::size_t max_tries, std::uint64_t seed);

PerturbationPair perturb_factor(const FactoredSpace& space, const ProductDistribution& p, std::size_t i,
                                std::vector<Rational> v);

struct InvarianceReport {
  std::vector<std::uint32_t> checked;  // blocks where the factor lies outside the history
  std::vector<std::uint32_t> skipped;  // blocks where it lies inside
  std::vector<std::uint32_t> violations;
  bool passed() const noexcept { return violations.empty(); }
};

/// Conditional law of x is unchanged on blocks whose history excludes the perturbed factor.
InvarianceReport irrelevance_invariance(const FactoredSpace& space, const PerturbationPair& pair,
                                        const RandomVariable& x, const RandomVariable& z);

struct ProductDifferenceReport {
  std::size_t cells = 0;
  std::size_t nonzero = 0;
  std::optional<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> first_nonzero;  // (z, x, y)
  bool passed() const noexcept { return nonzero == 0; }
};

/// (P(A|z) - Q(A|z)) (P(B|z) - Q(B|z)) == 0 for all events {x = a}, {y = b}. Requires structural independence.
ProductDifferenceReport product_difference_identity(const FactoredSpace& space, const PerturbationPair& pair,
                                                    const RandomVariable& x, const RandomVariable& y,
                                                    const RandomVariable& z);

}  // namespace facthist
