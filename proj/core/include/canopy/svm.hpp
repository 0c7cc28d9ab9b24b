#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "canopy/classifiers.hpp"
#include "canopy/matrix.hpp"

namespace canopy {

/// Dense symmetric kernel matrix view over a subset of rows.
struct KernelView {
  const Matrix* kernel = nullptr;        // full n x n kernel
  std::span<const std::size_t> rows;     // subset in problem order

  double operator()(std::size_t i, std::size_t j) const { return (*kernel)(rows[i], rows[j]); }
  std::size_t size() const { return rows.size(); }
};

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;  // decision = sum alpha_i y_i K(x_i, x) + bias
  std::size_t iterations = 0;
  bool converged = false;
};

/// Binary soft-margin dual with per-point box bounds, solved by SMO with
/// second-order working-set selection. y in {-1, +1}.
SmoResult smo_solve(const KernelView& k, std::span<const double> y, std::span<const double> cost, double tolerance,
                    std::size_t max_iterations = 0);

/// Largest KKT violation of a solution, measured on y_i f(x_i).
double smo_kkt_violation(const KernelView& k, std::span<const double> y, std::span<const double> cost,
                         const SmoResult& r);

Matrix squared_distances(const Matrix& a, const Matrix& b);
Matrix rbf_kernel(const Matrix& sq_dist, double gamma);

struct SvmConfig {
  std::vector<double> c_grid;      // default 2^-2 .. 2^6
  std::vector<double> gamma_grid;  // default 2^-7 .. 2^1, divided by feature count
  std::size_t tune_folds = 5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  bool tune = true;
  double c = 1.0;      // used when tune is false
  double gamma = 0.0;  // used when tune is false; 0 means 1/f

  static SvmConfig defaults();
  void validate() const;
};

struct SvmTuneRecord {
  double c = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;  // mean weighted accuracy over internal folds
  std::size_t folds_used = 0;
};

struct SvmPair {
  int class_a = 0;  // +1 side
  int class_b = 0;  // -1 side
  std::vector<std::uint32_t> support;  // rows of SvmModel::support_vectors
  std::vector<double> coef;            // alpha_i y_i
  double bias = 0.0;
};

/// One-vs-one RBF SVM. Scores are vote fractions per class.
struct SvmModel {
  std::size_t n_classes = 0;
  double c = 0.0;
  double gamma = 0.0;
  Matrix support_vectors;
  std::vector<SvmPair> pairs;
  std::vector<SvmTuneRecord> grid;

  /// Pairwise decision values, one column per pair.
  Matrix pair_decisions(const Matrix& x) const;
  Prediction predict(const Matrix& x) const;
};

/// Trains at fixed (C, gamma) given a precomputed training kernel.
SvmModel train_svm_fixed(const Matrix& x, const Matrix& kernel, std::span<const int> y,
                         std::span<const double> weights, std::size_t n_classes, double c, double gamma,
                         double tolerance);

/// Grid-searches (C, gamma) by internal folds when cfg.tune is set, then
/// trains on all rows. `groups` (optional, one id per row) keeps rows of the
/// same group in one internal fold.
SvmModel fit_svm_rbf(const Matrix& x, std::span<const int> y, std::span<const double> weights, std::size_t n_classes,
                     const SvmConfig& cfg, std::span<const int> groups = {});

}  // namespace canopy
