#pragma once

#include <map>
#include <vector>

#include "facthist/space.hpp"

namespace facthist {

/// Per-block histories H(X | {Z = z}); keys are the attained z values.
struct ConditionalHistory {
  std::map<std::uint32_t, IndexSet> per_block;

  friend bool operator==(const ConditionalHistory&, const ConditionalHistory&) = default;
};

struct IndependenceVerdict {
  bool independent = true;
  /// Blocks whose histories intersect, with the shared factors. Empty iff independent.
  std::map<std::uint32_t, IndexSet> overlaps;
};

struct DisintegrationAtoms {
  std::vector<IndexSet> atoms;  // ascending by bit pattern
  IndexSet trivial_part;        // factors constant on the block
};

enum class HistoryMethod {
  enumeration,  // smallest generating set by increasing cardinality
  atoms,        // union of atoms the variable cannot ignore
};

/// U(C) = U_J(C) x U_{I\J}(C).
bool is_rectangle(const FactoredSpace& space, const Block& c, IndexSet j);

/// X restricted to C is a function of the J-coordinates.
bool determines(const FactoredSpace& space, const Block& c, IndexSet j, const RandomVariable& x);

bool generates(const FactoredSpace& space, const Block& c, IndexSet j, const RandomVariable& x);

// The subset-minimal J that generates x given c. Generating sets are closed
// under intersection, so the first generating set met in order of increasing
// cardinality is the minimum. A singleton block yields the empty set.
IndexSet history(const FactoredSpace& space, const Block& c, const RandomVariable& x,
                 HistoryMethod method = HistoryMethod::enumeration);

/// Same result as history(..., atoms) with the block's atoms computed up front.
IndexSet history_from_atoms(const FactoredSpace& space, const Block& c, const DisintegrationAtoms& atoms,
                            const RandomVariable& x);

ConditionalHistory conditional_history(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& z,
                                       HistoryMethod method = HistoryMethod::enumeration);

IndependenceVerdict structurally_independent(const FactoredSpace& space, const RandomVariable& x,
                                             const RandomVariable& y, const RandomVariable& z,
                                             HistoryMethod method = HistoryMethod::enumeration);

/// Verdict from two histories already computed against the same conditioning variable.
IndependenceVerdict compare_histories(const ConditionalHistory& hx, const ConditionalHistory& hy);

/// Atoms of the field of rectangle index sets on c, plus the constant-on-c factors.
DisintegrationAtoms disintegration_atoms(const FactoredSpace& space, const Block& c);

/// H(x | block) is contained in H(y | block) for every block of z.
bool structural_time_leq(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                         const RandomVariable& z);

}  // namespace facthist
