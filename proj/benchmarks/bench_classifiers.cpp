#include <benchmark/benchmark.h>

#include <random>

#include "canopy/classifiers.hpp"
#include "canopy/group_lasso.hpp"
#include "canopy/random_forest.hpp"
#include "canopy/svm.hpp"

namespace {

struct Blobs {
  canopy::Matrix x;
  std::vector<int> y;
  std::vector<double> w;
};

Blobs blobs(std::size_t rows, std::size_t features, std::size_t classes) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  Blobs b{canopy::Matrix(rows, features), {}, {}};
  for (std::size_t r = 0; r < rows; ++r) {
    const auto c = r % classes;
    for (std::size_t j = 0; j < features; ++j) b.x(r, j) = n(rng) + (j % classes == c ? 1.5 : 0.0);
    b.y.push_back(static_cast<int>(c));
  }
  b.w = canopy::sample_weights(b.y, canopy::class_weights(b.y, classes));
  return b;
}

void BM_SvmFixed(benchmark::State& state) {
  const auto b = blobs(static_cast<std::size_t>(state.range(0)), 50, 5);
  const double gamma = 1.0 / 50.0;
  const auto k = canopy::rbf_kernel(canopy::squared_distances(b.x, b.x), gamma);
  for (auto _ : state) benchmark::DoNotOptimize(canopy::train_svm_fixed(b.x, k, b.y, b.w, 5, 1.0, gamma, 1e-4));
}
BENCHMARK(BM_SvmFixed)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SvmTuned(benchmark::State& state) {
  const auto b = blobs(static_cast<std::size_t>(state.range(0)), 50, 5);
  auto cfg = canopy::SvmConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(canopy::fit_svm_rbf(b.x, b.y, b.w, 5, cfg));
}
BENCHMARK(BM_SvmTuned)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_RandomForest(benchmark::State& state) {
  const auto b = blobs(static_cast<std::size_t>(state.range(0)), 200, 5);
  canopy::RandomForestConfig cfg;
  cfg.n_trees = 100;
  for (auto _ : state) benchmark::DoNotOptimize(canopy::fit_random_forest(b.x, b.y, b.w, 5, cfg));
}
BENCHMARK(BM_RandomForest)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GroupLassoPath(benchmark::State& state) {
  const auto b = blobs(static_cast<std::size_t>(state.range(0)), 100, 5);
  for (auto _ : state) benchmark::DoNotOptimize(canopy::fit_group_lasso(b.x, b.y, b.w, 5));
}
BENCHMARK(BM_GroupLassoPath)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
