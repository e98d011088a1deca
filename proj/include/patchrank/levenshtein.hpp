#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace patchrank {

/// Single-row Levenshtein DP that asks for one equality answer at a time
/// (cells in row-major order). Lets a caller whose equality test is itself
/// a long computation drive the DP without recursion.
class LevenshteinStepper {
 public:
  LevenshteinStepper(std::size_t rows, std::size_t cols);

  bool done() const noexcept { return row_ >= rows_ || cols_ == 0; }
  /// (i, j): compare element i of the left sequence with element j of the right.
  std::pair<std::size_t, std::size_t> pending() const noexcept { return {row_, col_}; }
  void answer(bool equal);
  std::uint64_t result() const noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t row_ = 0;
  std::size_t col_ = 0;
  std::uint64_t corner_ = 0;
  std::vector<std::uint64_t> costs_;
};

/// Unit-cost edit distance between `a` and `b`; `equal(x, y)` decides
/// element equivalence.
template <class SeqA, class SeqB, class Equal>
std::uint64_t levenshtein(const SeqA& a, const SeqB& b, Equal&& equal) {
  LevenshteinStepper dp(std::size(a), std::size(b));
  while (!dp.done()) {
    auto [i, j] = dp.pending();
    dp.answer(equal(a[i], b[j]));
  }
  return dp.result();
}

template <class Seq>
std::uint64_t levenshtein(const Seq& a, const Seq& b) {
  return levenshtein(a, b, [](const auto& x, const auto& y) { return x == y; });
}

}  // namespace patchrank
