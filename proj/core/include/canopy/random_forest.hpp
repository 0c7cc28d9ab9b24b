#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "canopy/classifiers.hpp"
#include "canopy/matrix.hpp"

namespace canopy {

struct RandomForestConfig {
  std::size_t n_trees = 500;
  std::size_t mtry = 0;  // 0 means floor(sqrt(f))
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  float threshold = 0.0f;     // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t label = 0;     // leaf class (weighted majority, lowest index on ties)
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int predict(std::span<const double> row) const;
  std::size_t depth() const;
};

struct RandomForestModel {
  std::size_t n_classes = 0;
  std::size_t mtry = 0;
  std::uint64_t seed = 0;
  std::vector<DecisionTree> trees;
  double oob_accuracy = 0.0;  // over rows with at least one out-of-bag tree

  /// Scores are vote fractions.
  Prediction predict(const Matrix& x) const;
};

/// Grows one tree on a weighted bootstrap sample. `counts` holds the bootstrap
/// multiplicity of each row.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                       std::span<const std::uint32_t> counts, std::size_t n_classes, std::size_t mtry,
                       std::uint64_t seed);

RandomForestModel fit_random_forest(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                                    std::size_t n_classes, const RandomForestConfig& cfg = {});

}  // namespace canopy
