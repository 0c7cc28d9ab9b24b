#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "canopy/matrix.hpp"

namespace canopy {

/// Per-column centring and scaling fitted on training rows (sample std, n-1).
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<std::uint8_t> constant;  // column had zero spread; maps to 0

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
  void apply_row(std::span<const double> in, std::span<double> out) const;
  std::size_t size() const { return mean.size(); }
  std::size_t constant_count() const;
};

/// w_c = N / (K * n_c) over the K classes present, so that sum_c w_c n_c = N.
/// Classes with no rows get weight 0.
std::vector<double> class_weights(std::span<const int> y, std::size_t n_classes);
std::vector<double> sample_weights(std::span<const int> y, std::span<const double> class_weight);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

std::size_t count_classes(std::span<const int> y);

/// Labels and per-class scores (rows = samples, cols = classes).
struct Prediction {
  std::vector<int> labels;
  Matrix scores;
};

double accuracy(std::span<const int> truth, std::span<const int> predicted);
double weighted_accuracy(std::span<const int> truth, std::span<const int> predicted, std::span<const double> weights);

/// Fold index per group, stratified by class: groups of each class are
/// shuffled, then dealt round-robin with the cursor carried across classes.
std::vector<int> stratified_group_folds(std::span<const int> group_class, std::size_t k, std::uint64_t seed);

void check_training_inputs(const Matrix& x, std::span<const int> y, std::span<const double> weights);

}  // namespace canopy
