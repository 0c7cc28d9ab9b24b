#include "canopy/folds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "canopy/classifiers.hpp"
#include "canopy/error.hpp"
#include "canopy/hash.hpp"
#include "canopy/log.hpp"

namespace canopy {

std::vector<int> FoldAssignment::row_folds(std::span<const int> row_crown) const {
  std::vector<int> out;
  out.reserve(row_crown.size());
  for (int c : row_crown) out.push_back(crown_fold.at(static_cast<std::size_t>(c)));
  return out;
}

FoldAssignment make_folds(std::span<const int> crown_class, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("fold count must be at least 2");
  int max_class = -1;
  for (int c : crown_class) max_class = std::max(max_class, c);
  for (int c = 0; c <= max_class; ++c) {
    const auto n = static_cast<std::size_t>(std::count(crown_class.begin(), crown_class.end(), c));
    if (n > 0 && n < k)
      log::warn("class " + std::to_string(c) + " has " + std::to_string(n) + " crowns for " + std::to_string(k) +
                " folds; some folds will lack it");
  }
  FoldAssignment f;
  f.k = k;
  f.crown_fold = stratified_group_folds(crown_class, k, seed);
  return f;
}

std::vector<std::uint8_t> stratified_holdout(std::span<const int> crown_class, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test fraction must be in (0,1)");
  int max_class = -1;
  for (int c : crown_class) max_class = std::max(max_class, c);
  std::vector<std::uint8_t> test(crown_class.size(), 0);
  for (int c = 0; c <= max_class; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < crown_class.size(); ++i)
      if (crown_class[i] == c) members.push_back(i);
    if (members.empty()) continue;
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    std::shuffle(members.begin(), members.end(), rng);
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    else n_test = 0;
    for (std::size_t i = 0; i < n_test; ++i) test[members[i]] = 1;
  }
  return test;
}

}  // namespace canopy
