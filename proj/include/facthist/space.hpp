#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "facthist/error.hpp"
#include "facthist/index_set.hpp"

namespace facthist {

/// Caps applied when a space is constructed. Exceeding either is a hard error.
struct SpaceLimits {
  std::size_t max_outcomes = 1'000'000;
  std::size_t max_factors = 20;
};

struct Factor {
  std::string name;
  std::vector<std::string> domain;

  std::size_t cardinality() const noexcept { return domain.size(); }
};

/// One domain index per factor.
struct Outcome {
  std::vector<std::size_t> values;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// A finite product of factor domains. Outcomes are identified by their mixed-radix
// rank with the last factor varying fastest; the factors themselves are the
// coordinate projections.
class FactoredSpace {
 public:
  explicit FactoredSpace(std::vector<Factor> factors, SpaceLimits limits = {});

  /// Convenience: factors named u0, u1, ... with labels "0".."d-1".
  static FactoredSpace with_domains(std::span<const std::size_t> sizes, SpaceLimits limits = {});
  static FactoredSpace with_domains(std::initializer_list<std::size_t> sizes, SpaceLimits limits = {}) {
    std::vector<std::size_t> v(sizes);
    return with_domains(std::span<const std::size_t>(v), limits);
  }

  std::size_t factor_count() const noexcept { return factors_.size(); }
  std::size_t outcome_count() const noexcept { return outcome_count_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  const Factor& factor(std::size_t i) const;
  std::size_t cardinality(std::size_t i) const { return factor(i).cardinality(); }
  std::size_t stride(std::size_t i) const noexcept { return strides_[i]; }
  IndexSet all_factors() const noexcept { return IndexSet::full(factors_.size()); }

  /// Factor id by name; throws unknown_factor.
  std::size_t factor_id(const std::string& name) const;
  bool has_factor(const std::string& name) const noexcept;

  /// Coordinate of factor i in the outcome with the given rank.
  std::size_t coordinate(std::size_t rank, std::size_t i) const noexcept {
    return (rank / strides_[i]) % factors_[i].cardinality();
  }

  /// Rank of the outcome obtained by zeroing every coordinate outside `j`.
  /// Two outcomes share a J-projection iff their keys are equal, and
  /// key(J) + key(complement J) == rank.
  std::size_t projection_key(std::size_t rank, IndexSet j) const noexcept;

  /// Whether two spaces have the same factor cardinalities (names ignored).
  bool same_shape(const FactoredSpace& other) const noexcept;

  friend bool operator==(const FactoredSpace& a, const FactoredSpace& b) {
    return a.outcome_count_ == b.outcome_count_ && a.factors_.size() == b.factors_.size() &&
           std::equal(a.factors_.begin(), a.factors_.end(), b.factors_.begin(),
                      [](const Factor& x, const Factor& y) { return x.name == y.name && x.domain == y.domain; });
  }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t outcome_count_ = 1;
};

std::size_t outcome_rank(const FactoredSpace& space, const Outcome& o);
Outcome outcome_unrank(const FactoredSpace& space, std::size_t rank);

// A total function from outcomes to a finite codomain, stored densely by outcome rank.
class RandomVariable {
 public:
  RandomVariable(std::string name, std::vector<std::string> codomain, std::vector<std::uint32_t> table);

  /// Table built from fn(rank) -> codomain index; codomain labels "0".."n-1".
  static RandomVariable from_function(const FactoredSpace& space, std::string name, std::size_t codomain_size,
                                      const std::function<std::uint32_t(std::size_t)>& fn);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& codomain() const noexcept { return codomain_; }
  std::size_t codomain_size() const noexcept { return codomain_.size(); }
  const std::vector<std::uint32_t>& table() const noexcept { return table_; }
  std::uint32_t operator()(std::size_t rank) const { return table_[rank]; }
  std::uint32_t at(const FactoredSpace& space, const Outcome& o) const { return table_[outcome_rank(space, o)]; }

  /// Throws space_mismatch unless the table covers exactly this space's outcomes.
  void check_on(const FactoredSpace& space) const;

  friend bool operator==(const RandomVariable&, const RandomVariable&) = default;

 private:
  std::string name_;
  std::vector<std::string> codomain_;
  std::vector<std::uint32_t> table_;
};

/// The atom {Z = label}; outcome ranks ascending.
struct Block {
  std::uint32_t label = 0;
  std::vector<std::size_t> outcomes;

  std::size_t size() const noexcept { return outcomes.size(); }
};

using BlockMap = std::map<std::uint32_t, Block>;

RandomVariable factor_var(const FactoredSpace& space, std::size_t i);
RandomVariable trivial_var(const FactoredSpace& space);
RandomVariable pair_var(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y);
/// Left fold of pair_var; an empty list gives the trivial variable.
RandomVariable tuple_var(const FactoredSpace& space, std::span<const RandomVariable> vars);
/// U_J as one variable: the tuple of the factor projections in j.
RandomVariable factors_var(const FactoredSpace& space, IndexSet j);

BlockMap blocks_of(const FactoredSpace& space, const RandomVariable& z);
/// The block covering every outcome.
Block whole_space(const FactoredSpace& space);

}  // namespace facthist
