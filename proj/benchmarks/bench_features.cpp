#include <benchmark/benchmark.h>

#include <random>

#include "canopy/features.hpp"
#include "canopy/parallel.hpp"
#include "canopy/slic.hpp"
#include "canopy/synth.hpp"
#include "canopy/texture.hpp"

namespace {

canopy::Image noise(std::size_t side, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u;
  canopy::Image img(side, side);
  for (auto& v : img.values) v = u(rng);
  return img;
}

void BM_Glcm(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 1);
  const canopy::LevelImage levels{img.width, img.height, canopy::quantize_levels(img.values)};
  for (auto _ : state)
    for (int d = 1; d <= 3; ++d) benchmark::DoNotOptimize(canopy::glcm_features(levels, {}, d));
}
BENCHMARK(BM_Glcm)->Arg(18)->Arg(64);

void BM_Lbp(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    for (int r = 1; r <= 3; ++r) benchmark::DoNotOptimize(canopy::lbp_histogram(img, {}, r));
}
BENCHMARK(BM_Lbp)->Arg(18)->Arg(64);

void BM_Laws(benchmark::State& state) {
  const auto img = noise(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(canopy::laws_features(img, {}));
}
BENCHMARK(BM_Laws)->Arg(18)->Arg(64);

// Full 1977-column extraction over a small synthetic scene.
void BM_ExtractFeatures(benchmark::State& state) {
  auto spec = canopy::SceneSpec::defaults();
  spec.width = spec.height = static_cast<std::size_t>(state.range(0));
  spec.crowns_per_class = 2;
  const auto scene = canopy::generate_scene(spec);
  const auto part = canopy::slic_segment(scene.rgb, scene.rgb_geo, canopy::SlicConfig{});
  const canopy::SceneImagery imagery{&scene.rgb, scene.rgb_geo, &scene.ms, scene.ms_geo, &scene.dsm, scene.dsm_geo};
  canopy::set_worker_count(1);
  for (auto _ : state) benchmark::DoNotOptimize(canopy::extract_features(imagery, part, canopy::FeatureConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(part.region_count()));
}
BENCHMARK(BM_ExtractFeatures)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
