#include "patchrank/levenshtein.hpp"

namespace patchrank {

LevenshteinStepper::LevenshteinStepper(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), costs_(cols + 1) {
  for (std::size_t k = 0; k <= cols; ++k) costs_[k] = k;
  if (rows_ > 0) {
    costs_[0] = 1;
    corner_ = 0;
  }
}

void LevenshteinStepper::answer(bool equal) {
  // costs_[col_ + 1] still holds the previous row's value ("upper").
  std::uint64_t upper = costs_[col_ + 1];
  if (equal) {
    costs_[col_ + 1] = corner_;
  } else {
    costs_[col_ + 1] = std::min({upper, corner_, costs_[col_]}) + 1;
  }
  corner_ = upper;
  if (++col_ == cols_) {
    col_ = 0;
    if (++row_ < rows_) {
      corner_ = row_;
      costs_[0] = row_ + 1;
    }
  }
}

std::uint64_t LevenshteinStepper::result() const noexcept {
  if (cols_ == 0) return rows_;
  return costs_[cols_];
}

}  // namespace patchrank
