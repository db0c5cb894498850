#pragma once

#include "facthist/space.hpp"

namespace fixtures {

inline facthist::RandomVariable xor_var(const facthist::FactoredSpace& s) {
  return facthist::RandomVariable::from_function(s, "xor", 2, [&](std::size_t r) {
    return static_cast<std::uint32_t>((s.coordinate(r, 0) + s.coordinate(r, 1)) % 2);
  });
}

/// Block {xor = v} on the 2x2 space.
inline facthist::Block xor_block(const facthist::FactoredSpace& s, std::uint32_t v) {
  return facthist::blocks_of(s, xor_var(s)).at(v);
}

}  // namespace fixtures
