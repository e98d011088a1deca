#pragma once

// Structural distance between captured object graphs.
//
//   null vs null                         0
//   null vs anything else                1
//   primitives of one type               0 if canonical values match, else 1
//   strings                              Levenshtein over code points
//   arrays of one component type         Levenshtein over elements; two elements
//                                        are equal iff their distance is 0
//   objects of one type                  sum of field distances (+1 per field
//                                        present on one side only)
//   any other combination                infinite
//
// A pair revisited while its own comparison is still in progress contributes
// 0, which makes the recursion terminate on cyclic graphs.

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "patchrank/objgraph.hpp"

namespace patchrank {

/// Non-negative integer distance or +infinity. Finite addition saturates at
/// the 64-bit maximum, which still compares below infinity.
class ExtendedDistance {
 public:
  static constexpr std::uint64_t kMaxFinite = std::numeric_limits<std::uint64_t>::max();

  constexpr ExtendedDistance() = default;
  static constexpr ExtendedDistance finite(std::uint64_t v) { return ExtendedDistance(v, false); }
  static constexpr ExtendedDistance infinite() { return ExtendedDistance(0, true); }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_zero() const noexcept { return !infinite_ && value_ == 0; }
  /// Only meaningful for finite values.
  constexpr std::uint64_t value() const noexcept { return value_; }

  friend constexpr ExtendedDistance operator+(ExtendedDistance a, ExtendedDistance b) {
    if (a.infinite_ || b.infinite_) return infinite();
    std::uint64_t sum = a.value_ + b.value_;
    return finite(sum < a.value_ ? kMaxFinite : sum);
  }
  ExtendedDistance& operator+=(ExtendedDistance other) { return *this = *this + other; }

  friend constexpr bool operator==(ExtendedDistance, ExtendedDistance) = default;
  friend constexpr std::strong_ordering operator<=>(ExtendedDistance a, ExtendedDistance b) {
    if (a.infinite_ != b.infinite_) return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const;

 private:
  constexpr ExtendedDistance(std::uint64_t v, bool inf) : value_(inf ? 0 : v), infinite_(inf) {}

  std::uint64_t value_ = 0;
  bool infinite_ = false;
};

/// Exact non-negative rational or +infinity. Kept unreduced (numerator is a
/// sum, denominator a count) so serialized values show how they were formed;
/// comparison and equality are by value.
class ExtendedRational {
 public:
  using Numerator = unsigned __int128;

  ExtendedRational() = default;
  /// Throws std::invalid_argument when `denominator` is zero.
  static ExtendedRational finite(Numerator numerator, std::uint64_t denominator);
  static ExtendedRational infinite();

  bool is_infinite() const noexcept { return infinite_; }
  Numerator numerator() const noexcept { return num_; }
  std::uint64_t denominator() const noexcept { return den_; }
  bool is_zero() const noexcept { return !infinite_ && num_ == 0; }

  /// Same value and same representation.
  bool identical(const ExtendedRational& other) const noexcept {
    return infinite_ == other.infinite_ && num_ == other.num_ && den_ == other.den_;
  }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
  friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b);

  /// "num/den" or "inf".
  std::string to_string() const;

 private:
  Numerator num_ = 0;
  std::uint64_t den_ = 1;
  bool infinite_ = false;
};

std::string to_decimal(unsigned __int128 v);

struct NodePairHash {
  std::size_t operator()(const std::pair<NodeId, NodeId>& p) const noexcept {
    std::uint64_t h = p.first * 0x9E3779B97F4A7C15ull;
    h ^= p.second + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Comparison state for one traversal: pairs whose comparison is in progress
/// (the cycle cut-off), plus results of finished comparisons that never hit
/// the cut-off. Those results cannot depend on what else is on the stack, so
/// reusing them leaves every distance unchanged.
class PairMemo {
 public:
  bool in_progress(NodeId left, NodeId right) const { return active_.contains({left, right}); }

 private:
  friend class DistanceEngine;
  std::unordered_set<std::pair<NodeId, NodeId>, NodePairHash> active_;
  std::unordered_map<std::pair<NodeId, NodeId>, ExtendedDistance, NodePairHash> settled_;
};

/// Throws Error(kDanglingNode) if an id fails to resolve during traversal.
ExtendedDistance node_dist(const ObjectGraph& g1, NodeId n1, const ObjectGraph& g2, NodeId n2, PairMemo& memo);
ExtendedDistance node_dist(const ObjectGraph& g1, NodeId n1, const ObjectGraph& g2, NodeId n2);

/// Roots are paired positionally; differing arity is infinitely far.
ExtendedDistance snapshot_dist(const Snapshot& s1, const Snapshot& s2);

/// Exact mean of snapshot_dist over the full cross product. Throws
/// Error(kEmptySnapshotSet) if either side is empty.
ExtendedRational avg_pair_distance(std::span<const Snapshot> original, std::span<const Snapshot> patched);

}  // namespace patchrank
