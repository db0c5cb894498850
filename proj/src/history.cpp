#include "facthist/history.hpp"

#include <algorithm>
#include <utility>

namespace facthist {
namespace {

std::size_t count_distinct(std::vector<std::size_t>& keys) {
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

bool is_rectangle(const FactoredSpace& space, const Block& c, IndexSet j) {
  const IndexSet all = space.all_factors();
  j = j & all;
  if (j.empty() || j == all || c.size() <= 1) return true;
  const IndexSet rest = j.complement(space.factor_count());
  std::vector<std::size_t> left, right;
  left.reserve(c.size());
  right.reserve(c.size());
  for (auto r : c.outcomes) {
    left.push_back(space.projection_key(r, j));
    right.push_back(space.projection_key(r, rest));
  }
  // rank = key(J) + key(J-bar), so C embeds injectively into the product of its
  // projections; equality of sizes is equivalent to equality of sets.
  const std::size_t nl = count_distinct(left);
  const std::size_t nr = count_distinct(right);
  return nl * nr == c.size();
}

bool determines(const FactoredSpace& space, const Block& c, IndexSet j, const RandomVariable& x) {
  x.check_on(space);
  if (c.outcomes.empty()) return true;
  std::vector<std::pair<std::size_t, std::uint32_t>> rows;
  rows.reserve(c.size());
  for (auto r : c.outcomes) rows.emplace_back(space.projection_key(r, j), x(r));
  std::sort(rows.begin(), rows.end());
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].first == rows[k - 1].first && rows[k].second != rows[k - 1].second) return false;
  }
  return true;
}

bool generates(const FactoredSpace& space, const Block& c, IndexSet j, const RandomVariable& x) {
  return determines(space, c, j, x) && is_rectangle(space, c, j);
}

IndexSet history(const FactoredSpace& space, const Block& c, const RandomVariable& x, HistoryMethod method) {
  x.check_on(space);
  if (method == HistoryMethod::atoms) return history_from_atoms(space, c, disintegration_atoms(space, c), x);

  const IndexSet all = space.all_factors();
  for (std::size_t k = 0; k <= space.factor_count(); ++k) {
    IndexSet found;
    const bool hit = for_each_subset_of_size(all, k, [&](IndexSet j) {
      if (!generates(space, c, j, x)) return false;
      found = j;
      return true;
    });
    if (hit) return found;
  }
  throw Error(ErrorKind::invariant_violation, "the full index set failed to generate " + x.name());
}

IndexSet history_from_atoms(const FactoredSpace& space, const Block& c, const DisintegrationAtoms& atoms,
                            const RandomVariable& x) {
  // Generating sets are unions of atoms (trivial factors optional) that determine x,
  // so an atom belongs to the history iff dropping it loses determination.
  const IndexSet all = space.all_factors();
  IndexSet h;
  for (const auto& atom : atoms.atoms) {
    if (!determines(space, c, all - atom, x)) h = h | atom;
  }
  return h;
}

ConditionalHistory conditional_history(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& z,
                                       HistoryMethod method) {
  x.check_on(space);
  ConditionalHistory out;
  for (const auto& [label, block] : blocks_of(space, z)) out.per_block.emplace(label, history(space, block, x, method));
  return out;
}

IndependenceVerdict compare_histories(const ConditionalHistory& hx, const ConditionalHistory& hy) {
  if (hx.per_block.size() != hy.per_block.size()) {
    throw Error(ErrorKind::space_mismatch, "conditional histories over different conditioning partitions");
  }
  IndependenceVerdict v;
  for (const auto& [label, h] : hx.per_block) {
    const auto it = hy.per_block.find(label);
    if (it == hy.per_block.end()) {
      throw Error(ErrorKind::space_mismatch, "conditional histories over different conditioning partitions");
    }
    const IndexSet shared = h & it->second;
    if (!shared.empty()) v.overlaps.emplace(label, shared);
  }
  v.independent = v.overlaps.empty();
  return v;
}

IndependenceVerdict structurally_independent(const FactoredSpace& space, const RandomVariable& x,
                                             const RandomVariable& y, const RandomVariable& z, HistoryMethod method) {
  x.check_on(space);
  y.check_on(space);
  IndependenceVerdict v;
  for (const auto& [label, block] : blocks_of(space, z)) {
    const IndexSet hx = history(space, block, x, method);
    if (hx.empty()) continue;
    const IndexSet shared = hx & history(space, block, y, method);
    if (!shared.empty()) v.overlaps.emplace(label, shared);
  }
  v.independent = v.overlaps.empty();
  return v;
}

DisintegrationAtoms disintegration_atoms(const FactoredSpace& space, const Block& c) {
  DisintegrationAtoms out;
  std::vector<IndexSet> seen;
  IndexSet covered;
  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    const auto ui = factor_var(space, i);
    const IndexSet h = history(space, c, ui, HistoryMethod::enumeration);
    if (h.empty()) {
      out.trivial_part.insert(i);
      continue;
    }
    if (std::find(seen.begin(), seen.end(), h) != seen.end()) continue;
    if (!h.disjoint(covered) || !h.contains(i)) {
      throw Error(ErrorKind::invariant_violation, "disintegration atoms overlap on factor " + std::to_string(i));
    }
    covered = covered | h;
    seen.push_back(h);
  }
  if ((covered | out.trivial_part) != space.all_factors() || !covered.disjoint(out.trivial_part)) {
    throw Error(ErrorKind::invariant_violation, "disintegration atoms do not partition the non-trivial factors");
  }
  std::sort(seen.begin(), seen.end());
  out.atoms = std::move(seen);
  return out;
}

bool structural_time_leq(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                         const RandomVariable& z) {
  x.check_on(space);
  y.check_on(space);
  for (const auto& [label, block] : blocks_of(space, z)) {
    if (!history(space, block, x).subset_of(history(space, block, y))) return false;
  }
  return true;
}

}  // namespace facthist
