#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace canopy {

/// Crown-level fold assignment; superpixels inherit their crown's fold.
struct FoldAssignment {
  std::size_t k = 0;
  std::vector<int> crown_fold;  // per crown index

  /// Fold of each row given the crown index of each row.
  std::vector<int> row_folds(std::span<const int> row_crown) const;
};

/// Per-class shuffle, then round-robin with the fold cursor carried across
/// classes. Warns when a class has fewer than k crowns.
FoldAssignment make_folds(std::span<const int> crown_class, std::size_t k, std::uint64_t seed);

/// Stratified crown holdout: in each class, round(fraction * n_c) shuffled
/// crowns (at least one when n_c >= 2) form the test set. Returns 1 for test.
std::vector<std::uint8_t> stratified_holdout(std::span<const int> crown_class, double test_fraction, std::uint64_t seed);

}  // namespace canopy
