#include "facthist/space.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

namespace facthist {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_space: return "invalid-space";
    case ErrorKind::invalid_outcome: return "invalid-outcome";
    case ErrorKind::invalid_rank: return "invalid-rank";
    case ErrorKind::unknown_factor: return "unknown-factor";
    case ErrorKind::invalid_variable: return "invalid-variable";
    case ErrorKind::space_mismatch: return "space-mismatch";
    case ErrorKind::space_too_large: return "space-too-large";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::degenerate_block: return "degenerate-block";
    case ErrorKind::bad_distribution: return "bad-distribution";
    case ErrorKind::bad_perturbation: return "bad-perturbation";
    case ErrorKind::precondition_not_structural: return "precondition-not-structural";
    case ErrorKind::precondition_is_structural: return "precondition-is-structural";
    case ErrorKind::invalid_dag: return "invalid-dag";
    case ErrorKind::unknown_node: return "unknown-node";
    case ErrorKind::invalid_query: return "invalid-query";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::unknown_name: return "unknown-name";
  }
  return "error";
}

std::string IndexSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (auto id : ids()) {
    if (!first) out += ',';
    out += std::to_string(id);
    first = false;
  }
  return out + "}";
}

FactoredSpace::FactoredSpace(std::vector<Factor> factors, SpaceLimits limits) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorKind::invalid_space, "a space needs at least one factor");
  if (factors_.size() > std::min(limits.max_factors, kMaxFactorsHard)) {
    throw Error(ErrorKind::space_too_large, std::to_string(factors_.size()) + " factors exceeds the cap of " +
                                                std::to_string(std::min(limits.max_factors, kMaxFactorsHard)));
  }
  std::unordered_set<std::string> names;
  for (const auto& f : factors_) {
    if (f.domain.empty()) throw Error(ErrorKind::invalid_space, "factor '" + f.name + "' has an empty domain");
    if (!names.insert(f.name).second) throw Error(ErrorKind::invalid_space, "duplicate factor name '" + f.name + "'");
  }
  strides_.assign(factors_.size(), 1);
  outcome_count_ = 1;
  for (std::size_t k = factors_.size(); k-- > 0;) {
    strides_[k] = outcome_count_;
    const auto d = factors_[k].cardinality();
    if (outcome_count_ > limits.max_outcomes / d) {
      throw Error(ErrorKind::space_too_large,
                  "outcome count exceeds the cap of " + std::to_string(limits.max_outcomes));
    }
    outcome_count_ *= d;
  }
  if (outcome_count_ > limits.max_outcomes) {
    throw Error(ErrorKind::space_too_large, "outcome count exceeds the cap of " + std::to_string(limits.max_outcomes));
  }
}

FactoredSpace FactoredSpace::with_domains(std::span<const std::size_t> sizes, SpaceLimits limits) {
  std::vector<Factor> factors;
  factors.reserve(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Factor f{"u" + std::to_string(i), {}};
    for (std::size_t v = 0; v < sizes[i]; ++v) f.domain.push_back(std::to_string(v));
    factors.push_back(std::move(f));
  }
  return FactoredSpace(std::move(factors), limits);
}

const Factor& FactoredSpace::factor(std::size_t i) const {
  if (i >= factors_.size()) throw Error(ErrorKind::unknown_factor, "factor id " + std::to_string(i));
  return factors_[i];
}

std::size_t FactoredSpace::factor_id(const std::string& name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return i;
  }
  throw Error(ErrorKind::unknown_factor, "no factor named '" + name + "'");
}

bool FactoredSpace::has_factor(const std::string& name) const noexcept {
  return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.name == name; });
}

std::size_t FactoredSpace::projection_key(std::size_t rank, IndexSet j) const noexcept {
  std::size_t key = 0;
  for (auto b = j.bits(); b != 0; b &= b - 1) {
    const auto i = static_cast<std::size_t>(std::countr_zero(b));
    key += coordinate(rank, i) * strides_[i];
  }
  return key;
}

bool FactoredSpace::same_shape(const FactoredSpace& other) const noexcept {
  if (factors_.size() != other.factors_.size()) return false;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].cardinality() != other.factors_[i].cardinality()) return false;
  }
  return true;
}

std::size_t outcome_rank(const FactoredSpace& space, const Outcome& o) {
  if (o.values.size() != space.factor_count()) {
    throw Error(ErrorKind::invalid_outcome, "outcome has " + std::to_string(o.values.size()) + " coordinates, space has " +
                                                std::to_string(space.factor_count()));
  }
  std::size_t rank = 0;
  for (std::size_t i = 0; i < o.values.size(); ++i) {
    if (o.values[i] >= space.cardinality(i)) {
      throw Error(ErrorKind::invalid_outcome, "coordinate " + std::to_string(i) + " out of range");
    }
    rank += o.values[i] * space.stride(i);
  }
  return rank;
}

Outcome outcome_unrank(const FactoredSpace& space, std::size_t rank) {
  if (rank >= space.outcome_count()) {
    throw Error(ErrorKind::invalid_rank, "rank " + std::to_string(rank) + " >= " + std::to_string(space.outcome_count()));
  }
  Outcome o;
  o.values.resize(space.factor_count());
  for (std::size_t i = 0; i < space.factor_count(); ++i) o.values[i] = space.coordinate(rank, i);
  return o;
}

RandomVariable::RandomVariable(std::string name, std::vector<std::string> codomain, std::vector<std::uint32_t> table)
    : name_(std::move(name)), codomain_(std::move(codomain)), table_(std::move(table)) {
  if (codomain_.empty()) throw Error(ErrorKind::invalid_variable, "variable '" + name_ + "' has an empty codomain");
  for (auto v : table_) {
    if (v >= codomain_.size()) {
      throw Error(ErrorKind::invalid_variable,
                  "variable '" + name_ + "' has table entry " + std::to_string(v) + " outside its codomain");
    }
  }
}

RandomVariable RandomVariable::from_function(const FactoredSpace& space, std::string name, std::size_t codomain_size,
                                             const std::function<std::uint32_t(std::size_t)>& fn) {
  std::vector<std::string> labels;
  labels.reserve(codomain_size);
  for (std::size_t v = 0; v < codomain_size; ++v) labels.push_back(std::to_string(v));
  std::vector<std::uint32_t> table(space.outcome_count());
  for (std::size_t r = 0; r < table.size(); ++r) table[r] = fn(r);
  return RandomVariable(std::move(name), std::move(labels), std::move(table));
}

void RandomVariable::check_on(const FactoredSpace& space) const {
  if (table_.size() != space.outcome_count()) {
    throw Error(ErrorKind::space_mismatch, "variable '" + name_ + "' has " + std::to_string(table_.size()) +
                                               " entries, space has " + std::to_string(space.outcome_count()) +
                                               " outcomes");
  }
}

RandomVariable factor_var(const FactoredSpace& space, std::size_t i) {
  const auto& f = space.factor(i);
  std::vector<std::uint32_t> table(space.outcome_count());
  for (std::size_t r = 0; r < table.size(); ++r) table[r] = static_cast<std::uint32_t>(space.coordinate(r, i));
  return RandomVariable(f.name, f.domain, std::move(table));
}

RandomVariable trivial_var(const FactoredSpace& space) {
  return RandomVariable("()", {"*"}, std::vector<std::uint32_t>(space.outcome_count(), 0));
}

RandomVariable pair_var(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y) {
  x.check_on(space);
  y.check_on(space);
  const std::size_t n = space.outcome_count();
  const std::size_t ny = y.codomain_size();
  // Attained pairs, numbered in lexicographic (x, y) order.
  std::vector<std::uint64_t> codes(n);
  for (std::size_t r = 0; r < n; ++r) codes[r] = std::uint64_t{x(r)} * ny + y(r);
  std::vector<std::uint64_t> attained = codes;
  std::sort(attained.begin(), attained.end());
  attained.erase(std::unique(attained.begin(), attained.end()), attained.end());
  if (attained.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::invalid_variable, "pair codomain too large");
  }
  std::vector<std::string> labels;
  labels.reserve(attained.size());
  for (auto c : attained) labels.push_back("(" + x.codomain()[c / ny] + "," + y.codomain()[c % ny] + ")");
  std::vector<std::uint32_t> table(n);
  for (std::size_t r = 0; r < n; ++r) {
    table[r] = static_cast<std::uint32_t>(std::lower_bound(attained.begin(), attained.end(), codes[r]) - attained.begin());
  }
  return RandomVariable("(" + x.name() + "," + y.name() + ")", std::move(labels), std::move(table));
}

RandomVariable tuple_var(const FactoredSpace& space, std::span<const RandomVariable> vars) {
  if (vars.empty()) return trivial_var(space);
  vars.front().check_on(space);
  if (vars.size() == 1) return vars.front();
  RandomVariable acc = pair_var(space, vars[0], vars[1]);
  for (std::size_t k = 2; k < vars.size(); ++k) acc = pair_var(space, acc, vars[k]);
  return acc;
}

RandomVariable factors_var(const FactoredSpace& space, IndexSet j) {
  std::vector<RandomVariable> parts;
  for (auto i : j.ids()) parts.push_back(factor_var(space, i));
  return tuple_var(space, parts);
}

BlockMap blocks_of(const FactoredSpace& space, const RandomVariable& z) {
  z.check_on(space);
  BlockMap blocks;
  for (std::size_t r = 0; r < space.outcome_count(); ++r) {
    auto& b = blocks[z(r)];
    b.label = z(r);
    b.outcomes.push_back(r);
  }
  return blocks;
}

Block whole_space(const FactoredSpace& space) {
  Block b;
  b.outcomes.resize(space.outcome_count());
  for (std::size_t r = 0; r < b.outcomes.size(); ++r) b.outcomes[r] = r;
  return b;
}

}  // namespace facthist
