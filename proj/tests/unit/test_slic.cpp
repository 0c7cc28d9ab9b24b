#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "canopy/error.hpp"
#include "canopy/parallel.hpp"
#include "canopy/slic.hpp"
#include "support.hpp"

using namespace canopy;

namespace {

Raster noisy_blobs(std::size_t w, std::size_t h, unsigned seed) {
  Raster r(w, h, {BandRole::red, BandRole::green, BandRole::blue});
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.03f);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const float base = 0.5f + 0.3f * std::sin(0.21f * static_cast<float>(x)) * std::cos(0.17f * static_cast<float>(y));
      for (std::size_t b = 0; b < 3; ++b)
        r.at(b, x, y) = std::clamp(base * (0.6f + 0.2f * static_cast<float>(b)) + noise(rng), 0.0f, 1.0f);
    }
  return r;
}

// Counts 4-connected components per label with a plain BFS.
std::size_t components_of(const SuperpixelPartition& p, std::uint32_t label) {
  std::vector<char> seen(p.labels.size(), 0);
  std::size_t count = 0;
  for (std::size_t s = 0; s < p.labels.size(); ++s) {
    if (p.labels[s] != label || seen[s]) continue;
    ++count;
    std::vector<std::size_t> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.back();
      queue.pop_back();
      const std::size_t x = i % p.width, y = i / p.width;
      const std::size_t nb[4] = {x > 0 ? i - 1 : i, x + 1 < p.width ? i + 1 : i, y > 0 ? i - p.width : i,
                                 y + 1 < p.height ? i + p.width : i};
      for (std::size_t j : nb)
        if (!seen[j] && p.labels[j] == label) {
          seen[j] = 1;
          queue.push_back(j);
        }
    }
  }
  return count;
}

}  // namespace

TEST(Slic, GridSpacingFromTargetArea) {
  EXPECT_EQ(grid_spacing({0, 0, 0.1, 0.1}, 0.5), 7u);
  EXPECT_EQ(grid_spacing({0, 0, 0.04, 0.04}, 0.5), 18u);
  EXPECT_EQ(grid_spacing({0, 0, 1.0, 1.0}, 0.1), 1u);
}

TEST(Slic, SeedGridCountsAndPlacement) {
  const auto seeds = seed_grid(100, 50, 7);
  EXPECT_EQ(seeds.size(), 15u * 8u);
  for (const auto& s : seeds) {
    EXPECT_GE(s.x, 0.0);
    EXPECT_LT(s.x, 100.0);
    EXPECT_LT(s.y, 50.0);
  }
  const auto one = seed_grid(10, 10, 10);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].x, 5.0);
  EXPECT_THROW(seed_grid(4, 4, 5), ValidationError);
  EXPECT_THROW(seed_grid(0, 4, 1), ValidationError);
}

TEST(Slic, EnforceConnectivitySplitsAndMerges) {
  // label 0 and label 2 each split in two, plus single pixels of labels 1 and 2
  const std::vector<std::uint32_t> labels{0, 0, 2, 0, 0,  //
                                          0, 0, 2, 0, 0,  //
                                          2, 2, 2, 1, 2};
  const auto big = enforce_connectivity(labels, 5, 3, 1);
  std::set<std::uint32_t> ids(big.begin(), big.end());
  EXPECT_EQ(ids.size(), 5u);
  EXPECT_EQ(big[0], 0u);
  EXPECT_NE(big[3], big[0]);
  const auto merged = enforce_connectivity(labels, 5, 3, 2);
  ids = std::set<std::uint32_t>(merged.begin(), merged.end());
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_EQ(merged[13], merged[12]);
  EXPECT_EQ(merged[14], merged[12]);
  EXPECT_THROW(enforce_connectivity(labels, 4, 3, 1), ValidationError);
}

TEST(Slic, PartitionIsCompleteAndConnected) {
  const Raster rgb = noisy_blobs(96, 80, 5);
  const GeoTransform geo{0, 0, 0.1, 0.1};
  const auto p = slic_segment(rgb, geo, SlicConfig{});
  ASSERT_EQ(p.labels.size(), 96u * 80u);
  std::vector<std::size_t> counts(p.region_count(), 0);
  for (auto l : p.labels) {
    ASSERT_LT(l, p.region_count());
    ++counts[l];
  }
  std::size_t total = 0;
  for (std::uint32_t r = 0; r < p.region_count(); ++r) {
    EXPECT_EQ(p.regions[r].id, r);
    EXPECT_EQ(p.regions[r].pixel_count, counts[r]);
    EXPECT_GT(counts[r], 0u);
    EXPECT_EQ(components_of(p, r), 1u) << "region " << r;
    total += counts[r];
  }
  EXPECT_EQ(total, p.labels.size());
  // 14x12 seeds at S = 7
  EXPECT_GT(p.region_count(), 14u * 12u / 2);
  EXPECT_LT(p.region_count(), 14u * 12u * 2);
}

TEST(Slic, SharpEdgeIsNeverStraddled) {
  Raster rgb(70, 42, {BandRole::red, BandRole::green, BandRole::blue});
  for (std::size_t y = 0; y < 42; ++y)
    for (std::size_t x = 35; x < 70; ++x)
      for (std::size_t b = 0; b < 3; ++b) rgb.at(b, x, y) = 1.0f;
  SlicConfig cfg;
  cfg.smoothing_sigma = 0.0;
  const auto p = slic_segment(rgb, {0, 0, 0.1, 0.1}, cfg);
  std::vector<int> colour(p.region_count(), -1);
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    const int c = (i % 70) >= 35 ? 1 : 0;
    int& seen = colour[p.labels[i]];
    if (seen < 0) seen = c;
    EXPECT_EQ(seen, c) << "pixel " << i;
  }
}

TEST(Slic, IdenticalAcrossWorkerCounts) {
  const Raster rgb = noisy_blobs(120, 90, 8);
  const GeoTransform geo{0, 0, 0.1, 0.1};
  const std::size_t before = worker_count();
  set_worker_count(1);
  const auto a = slic_segment(rgb, geo, SlicConfig{});
  set_worker_count(4);
  const auto b = slic_segment(rgb, geo, SlicConfig{});
  set_worker_count(before);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Slic, SinglePixelRaster) {
  Raster rgb(1, 1, {BandRole::red, BandRole::green, BandRole::blue});
  const auto p = slic_segment(rgb, {0, 0, 1.0, 1.0}, SlicConfig{});
  ASSERT_EQ(p.region_count(), 1u);
  EXPECT_EQ(p.regions[0].pixel_count, 1u);
}

TEST(Slic, RejectsBadConfig) {
  SlicConfig cfg;
  cfg.compactness = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  const Raster rgb = noisy_blobs(4, 4, 1);
  EXPECT_THROW(slic_segment(rgb, {0, 0, 0.01, 0.01}, SlicConfig{}), ValidationError);
}

TEST(Slic, PartitionFileRoundTrip) {
  test::TempDir dir("slic");
  const Raster rgb = noisy_blobs(40, 30, 2);
  const GeoTransform geo{500.0, 900.0, 0.1, 0.1};
  const auto p = slic_segment(rgb, geo, SlicConfig{});
  write_partition(p, geo, dir.file("p.fbr"), dir.file("p.csv"));
  const auto back = read_partition(dir.file("p.fbr"));
  EXPECT_EQ(back.geo, geo);
  EXPECT_EQ(back.partition.labels, p.labels);
  ASSERT_EQ(back.partition.region_count(), p.region_count());
  EXPECT_DOUBLE_EQ(back.partition.regions[3].centroid_x, p.regions[3].centroid_x);
}

TEST(Slic, FlatImageGivesNearRegularGrid) {
  Raster rgb(100, 100, {BandRole::red, BandRole::green, BandRole::blue});
  for (std::size_t b = 0; b < 3; ++b)
    for (auto& v : rgb.band(b)) v = 0.4f;
  const auto p = slic_segment(rgb, {0, 0, 0.1, 0.1}, SlicConfig{});
  // S = 7: a 15 x 15 seed grid over 10 000 pixels
  EXPECT_NEAR(static_cast<double>(p.region_count()), 225.0, 225.0 * 0.1);
  for (const auto& r : p.regions) {
    EXPECT_GE(r.pixel_count, 10000u / 225u / 2u) << "region " << r.id;
    EXPECT_LE(r.pixel_count, 10000u * 3u / 225u / 2u) << "region " << r.id;
  }
}
