#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "canopy/classifiers.hpp"
#include "canopy/features.hpp"
#include "canopy/group_lasso.hpp"
#include "canopy/random_forest.hpp"
#include "canopy/svm.hpp"

namespace canopy {

enum class ModelKind : std::uint8_t { lasso, svm, forest };

std::string_view to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

struct ModelOptions {
  ModelKind kind = ModelKind::svm;
  std::uint64_t seed = 0;
  GroupLassoConfig lasso;
  SvmConfig svm = SvmConfig::defaults();
  RandomForestConfig forest;

  void validate() const;
};

/// A fitted classifier bound to the feature layout it was trained on.
struct Model {
  ModelKind kind = ModelKind::svm;
  std::string manifest_hash;
  std::vector<std::string> feature_names;
  std::vector<std::string> classes;
  Standardizer standardizer;
  std::vector<double> class_weight;
  std::uint64_t seed = 0;
  std::variant<GroupLassoModel, SvmModel, RandomForestModel> impl;

  /// Throws ManifestMismatch unless the table has exactly the training layout.
  void check_manifest(const FeatureManifest& manifest) const;
  Prediction predict(const FeatureTable& table) const;
  Prediction predict_standardized(const Matrix& z) const;
};

/// Standardizes, weights classes inversely to their counts and fits.
/// `groups` (optional) keeps rows of one crown together during SVM tuning.
Model train_model(const FeatureTable& table, std::span<const int> y, const std::vector<std::string>& classes,
                  const ModelOptions& opt, std::span<const int> groups = {});

/// JSON envelope at `path` plus a little-endian float32 payload at `path + ".bin"`.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace canopy
