#include <benchmark/benchmark.h>

#include "canopy/parallel.hpp"
#include "canopy/slic.hpp"
#include "canopy/synth.hpp"

namespace {

canopy::Scene square_scene(std::size_t side) {
  auto spec = canopy::SceneSpec::defaults();
  spec.width = spec.height = side;
  spec.pixel_size = 0.1;
  spec.crowns_per_class = std::max<std::size_t>(1, side / 128);
  return canopy::generate_scene(spec);
}

void BM_SlicSegment(benchmark::State& state) {
  const auto scene = square_scene(static_cast<std::size_t>(state.range(0)));
  canopy::set_worker_count(static_cast<std::size_t>(state.range(1)));
  canopy::SlicConfig cfg;
  std::size_t regions = 0;
  for (auto _ : state) {
    const auto p = canopy::slic_segment(scene.rgb, scene.rgb_geo, cfg);
    regions = p.region_count();
    benchmark::DoNotOptimize(p.labels.data());
  }
  state.counters["regions"] = static_cast<double>(regions);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_SlicSegment)->Args({256, 1})->Args({512, 1})->Args({1024, 1})->Args({1024, 4})->Unit(benchmark::kMillisecond);

void BM_EnforceConnectivity(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint32_t> labels(side * side);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) labels[y * side + x] = static_cast<std::uint32_t>((x / 7) ^ (y / 5) ^ ((x * y) % 3));
  for (auto _ : state) benchmark::DoNotOptimize(canopy::enforce_connectivity(labels, side, side, 12));
}
BENCHMARK(BM_EnforceConnectivity)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
