#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace facthist {

inline constexpr std::size_t kMaxFactorsHard = 64;

/// Subset of factor ids, one bit per factor. Ids must be < 64.
class IndexSet {
 public:
  constexpr IndexSet() noexcept = default;
  constexpr explicit IndexSet(std::uint64_t bits) noexcept : bits_(bits) {}
  IndexSet(std::initializer_list<std::size_t> ids) noexcept {
    for (auto id : ids) bits_ |= bit(id);
  }

  /// {0, ..., n-1}
  static constexpr IndexSet full(std::size_t n) noexcept {
    return IndexSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr IndexSet single(std::size_t id) noexcept { return IndexSet(bit(id)); }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr bool contains(std::size_t id) const noexcept { return (bits_ & bit(id)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::size_t size() const noexcept {
    return static_cast<std::size_t>(std::popcount(bits_));
  }

  constexpr IndexSet& insert(std::size_t id) noexcept {
    bits_ |= bit(id);
    return *this;
  }
  constexpr IndexSet& erase(std::size_t id) noexcept {
    bits_ &= ~bit(id);
    return *this;
  }

  /// Complement relative to a space with n factors.
  constexpr IndexSet complement(std::size_t n) const noexcept {
    return IndexSet(~bits_ & full(n).bits_);
  }
  constexpr bool subset_of(IndexSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  constexpr bool disjoint(IndexSet other) const noexcept { return (bits_ & other.bits_) == 0; }

  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) noexcept { return IndexSet(a.bits_ | b.bits_); }
  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) noexcept { return IndexSet(a.bits_ & b.bits_); }
  friend constexpr IndexSet operator-(IndexSet a, IndexSet b) noexcept { return IndexSet(a.bits_ & ~b.bits_); }
  friend constexpr bool operator==(IndexSet, IndexSet) noexcept = default;
  friend constexpr auto operator<=>(IndexSet a, IndexSet b) noexcept { return a.bits_ <=> b.bits_; }

  std::vector<std::size_t> ids() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (auto b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  /// "{0,2,3}"
  std::string to_string() const;

 private:
  static constexpr std::uint64_t bit(std::size_t id) noexcept { return std::uint64_t{1} << id; }

  std::uint64_t bits_ = 0;
};

/// Visit every subset of `universe` with exactly k members, in increasing bit order.
template <class Fn>
bool for_each_subset_of_size(IndexSet universe, std::size_t k, Fn&& fn) {
  const auto ids = universe.ids();
  const std::size_t n = ids.size();
  if (k > n) return false;
  if (k == 0) return fn(IndexSet{});
  // Gosper's hack over positions within `ids`, then scatter.
  std::uint64_t pos = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit = (n == 64) ? 0 : (std::uint64_t{1} << n);
  while (true) {
    IndexSet s;
    for (auto b = pos; b != 0; b &= b - 1) s.insert(ids[static_cast<std::size_t>(std::countr_zero(b))]);
    if (fn(s)) return true;
    const std::uint64_t low = pos & -pos;
    const std::uint64_t ripple = pos + low;
    if (ripple == 0 || (limit != 0 && ripple >= limit)) break;
    pos = (((ripple ^ pos) >> 2) / low) | ripple;
    if (limit != 0 && pos >= limit) break;
  }
  return false;
}

/// Visit every subset of `universe` (2^|universe| of them).
template <class Fn>
void for_each_subset(IndexSet universe, Fn&& fn) {
  const std::uint64_t u = universe.bits();
  std::uint64_t s = 0;
  while (true) {
    fn(IndexSet(s));
    if (s == u) break;
    s = (s - u) & u;
  }
}

}  // namespace facthist
