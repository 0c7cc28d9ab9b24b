#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "canopy/error.hpp"
#include "canopy/model.hpp"
#include "support.hpp"

using namespace canopy;

namespace {

FeatureTable toy_table(std::size_t per_class, unsigned seed, std::vector<int>& y) {
  FeatureTable t;
  for (int j = 0; j < 6; ++j)
    t.manifest.entries.push_back({Imagery::rgb, FeatureFamily::spectral, "rgb", "stats", "b" + std::to_string(j), "mean", 0});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.6);
  y.clear();
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> row(6);
      for (std::size_t j = 0; j < 6; ++j) row[j] = 10.0 * static_cast<double>(j) + (j == c ? 2.5 : 0.0) + n(rng);
      t.values.append_row(row);
      t.region_ids.push_back(static_cast<std::uint32_t>(t.region_ids.size()));
      t.degenerate.push_back(0);
      y.push_back(static_cast<int>(c));
    }
  return t;
}

ModelOptions quick(ModelKind kind) {
  ModelOptions opt;
  opt.kind = kind;
  opt.seed = 5;
  opt.forest.n_trees = 50;
  opt.lasso.path_length = 20;
  opt.svm.c_grid = {1.0, 4.0};
  opt.svm.gamma_grid = {0.5, 1.0};
  opt.svm.tune_folds = 3;
  return opt;
}

const std::vector<std::string> kClasses{"alpha", "beta", "gamma"};

}  // namespace

class ModelKinds : public ::testing::TestWithParam<ModelKind> {};

TEST_P(ModelKinds, TrainsAndSurvivesSaveLoad) {
  std::vector<int> y;
  const auto table = toy_table(20, 1, y);
  const auto model = train_model(table, y, kClasses, quick(GetParam()));
  EXPECT_EQ(model.kind, GetParam());
  EXPECT_EQ(model.manifest_hash, table.manifest.hash());
  const auto p = model.predict(table);
  EXPECT_GE(accuracy(y, p.labels), 0.9);

  test::TempDir dir("model");
  save_model(model, dir.file("m.json"));
  const auto back = load_model(dir.file("m.json"));
  EXPECT_EQ(back.classes, kClasses);
  EXPECT_EQ(back.feature_names, table.manifest.names());
  const auto q = back.predict(table);
  EXPECT_EQ(q.labels, p.labels);
  ASSERT_EQ(q.scores.rows(), p.scores.rows());
  for (std::size_t i = 0; i < p.scores.data().size(); ++i)
    EXPECT_NEAR(q.scores.data()[i], p.scores.data()[i], 1e-4);
}

INSTANTIATE_TEST_SUITE_P(All, ModelKinds, ::testing::Values(ModelKind::lasso, ModelKind::svm, ModelKind::forest),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Model, TrainingIsDeterministic) {
  std::vector<int> y;
  const auto table = toy_table(15, 2, y);
  for (auto kind : {ModelKind::svm, ModelKind::forest}) {
    const auto a = train_model(table, y, kClasses, quick(kind)).predict(table);
    const auto b = train_model(table, y, kClasses, quick(kind)).predict(table);
    EXPECT_TRUE(std::equal(a.scores.data().begin(), a.scores.data().end(), b.scores.data().begin()));
  }
}

TEST(Model, PermutedManifestIsRejected) {
  std::vector<int> y;
  auto table = toy_table(10, 3, y);
  const auto model = train_model(table, y, kClasses, quick(ModelKind::forest));
  std::swap(table.manifest.entries[0], table.manifest.entries[1]);
  EXPECT_THROW(model.check_manifest(table.manifest), ManifestMismatch);
  EXPECT_THROW(model.predict(table), ManifestMismatch);
  table.manifest.entries.pop_back();
  EXPECT_THROW(model.predict(table), ManifestMismatch);
}

TEST(Model, CorruptArtifactsRejected) {
  std::vector<int> y;
  const auto table = toy_table(10, 4, y);
  const auto model = train_model(table, y, kClasses, quick(ModelKind::lasso));
  test::TempDir dir("model_bad");
  save_model(model, dir.file("m.json"));
  {
    std::ofstream bin(dir.file("m.json.bin"), std::ios::binary | std::ios::app);
    bin << "xx";
  }
  EXPECT_THROW(load_model(dir.file("m.json")), FormatError);
  {
    std::ofstream json(dir.file("n.json"));
    json << "{\"format\": \"something-else\"}";
  }
  EXPECT_THROW(load_model(dir.file("n.json")), FormatError);
  EXPECT_THROW(load_model(dir.file("missing.json")), Error);
}

TEST(Model, OptionsValidated) {
  EXPECT_EQ(model_kind_from_string("forest"), ModelKind::forest);
  EXPECT_THROW(model_kind_from_string("knn"), ValidationError);
  ModelOptions opt;
  opt.forest.n_trees = 0;
  EXPECT_NO_THROW(opt.validate());
  opt.kind = ModelKind::forest;
  EXPECT_THROW(opt.validate(), ValidationError);
  std::vector<int> y;
  const auto table = toy_table(5, 6, y);
  std::vector<int> one(y.size(), 0);
  EXPECT_THROW(train_model(table, one, kClasses, quick(ModelKind::svm)), ValidationError);
}
