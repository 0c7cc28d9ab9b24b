#pragma once

#include <span>
#include <vector>

#include "canopy/classifiers.hpp"
#include "canopy/matrix.hpp"

namespace canopy {

struct GroupLassoConfig {
  std::size_t max_groups = 25;
  std::size_t path_length = 100;
  double lambda_min_ratio = 1e-3;
  double tolerance = 1e-7;     // relative objective change per sweep
  std::size_t max_sweeps = 5000;

  void validate() const;
};

struct LassoPathPoint {
  double lambda = 0.0;
  std::size_t active_groups = 0;
  double weighted_accuracy = 0.0;
  double objective = 0.0;
};

/// Multinomial logistic regression with one group per feature spanning all
/// classes. coef is features x classes.
struct GroupLassoModel {
  std::size_t n_classes = 0;
  Matrix coef;
  std::vector<double> intercept;
  double lambda = 0.0;
  std::vector<std::size_t> active;
  std::vector<LassoPathPoint> path;
  std::size_t selected = 0;

  /// Class probabilities.
  Matrix decision(const Matrix& x) const;
  Prediction predict(const Matrix& x) const;
};

/// Weighted loss / W + lambda * sum_j ||coef_j||.
double group_lasso_objective(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                             const Matrix& coef, std::span<const double> intercept, double lambda);

/// Smallest lambda giving all-zero coefficients.
double group_lasso_lambda_max(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                              std::size_t n_classes);

/// Solves at a single lambda, warm-started from `model` (coef/intercept).
void group_lasso_solve(const Matrix& x, std::span<const int> y, std::span<const double> weights, double lambda,
                       const GroupLassoConfig& cfg, GroupLassoModel& model);

/// Fits the lambda path and keeps the point with the best weighted training
/// accuracy among those with at most cfg.max_groups active groups.
GroupLassoModel fit_group_lasso(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                                std::size_t n_classes, const GroupLassoConfig& cfg = {});

}  // namespace canopy
