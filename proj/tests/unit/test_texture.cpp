#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "canopy/error.hpp"
#include "canopy/texture.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace canopy;
using namespace canopy::oracle;

TEST(Quantize, LinearMapBetweenPercentiles) {
  std::vector<double> v(101);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const auto q = quantize_levels(v);
  EXPECT_EQ(q.front(), 1);
  EXPECT_EQ(q[5], 1);
  EXPECT_EQ(q[95], kGlcmLevels);
  EXPECT_EQ(q.back(), kGlcmLevels);
  EXPECT_EQ(q[50], static_cast<int>(std::round(1.0 + 31.0 * 45.0 / 90.0)));
  for (std::size_t i = 1; i < q.size(); ++i) EXPECT_LE(q[i - 1], q[i]);
}

TEST(Quantize, ConstantMapsToLevelOne) {
  const std::vector<double> v(20, 7.0);
  for (int l : quantize_levels(v)) EXPECT_EQ(l, 1);
}

TEST(Glcm, StepsCoverFourDirections) {
  const auto s = glcm_steps(2);
  EXPECT_EQ(s[0], (std::array<int, 2>{2, 0}));
  EXPECT_EQ(s[1], (std::array<int, 2>{2, -2}));
  EXPECT_EQ(s[2], (std::array<int, 2>{0, -2}));
  EXPECT_EQ(s[3], (std::array<int, 2>{-2, -2}));
}

TEST(Glcm, MatrixIsSymmetricAndNormalised) {
  std::mt19937_64 rng(5);
  const auto img = test::random_levels(9, 7, rng, 6);
  for (const auto& st : glcm_steps(1)) {
    const auto p = glcm_matrix(img, {}, st[0], st[1]);
    double sum = 0;
    for (std::size_t i = 0; i < kGlcmLevels; ++i)
      for (std::size_t j = 0; j < kGlcmLevels; ++j) {
        sum += p[i * kGlcmLevels + j];
        EXPECT_EQ(p[i * kGlcmLevels + j], p[j * kGlcmLevels + i]);
      }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Glcm, HaralickMatchesPairEnumerationOracle) {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int max_level = trial % 4 == 0 ? 3 : trial % 4 == 1 ? 8 : kGlcmLevels;
    const auto img = test::random_levels(8, 8, rng, max_level);
    for (int d = 1; d <= 3; ++d) {
      const auto f = glcm_features(img, {}, d);
      const auto steps = glcm_steps(d);
      for (std::size_t dir = 0; dir < 4; ++dir) {
        const auto expect = brute_haralick(brute_glcm(img, steps[dir][0], steps[dir][1]));
        for (std::size_t s = 0; s < kHaralickCount; ++s) {
          EXPECT_NEAR(f.per_direction[dir][s], expect[s], 1e-9)
              << haralick_names()[s] << " trial " << trial << " d " << d << " dir " << dir;
          ++compared;
        }
      }
    }
  }
  EXPECT_EQ(compared, 200 * 3 * 4 * 13);
}

TEST(Glcm, ConstantImage) {
  const LevelImage img{6, 6, std::vector<int>(36, 4)};
  const auto f = glcm_features(img, {}, 1);
  const auto idx = [](std::string_view n) {
    const auto names = haralick_names();
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin());
  };
  EXPECT_DOUBLE_EQ(f.mean[idx("asm")], 1.0);
  EXPECT_DOUBLE_EQ(f.mean[idx("con")], 0.0);
  EXPECT_DOUBLE_EQ(f.mean[idx("ent")], 0.0);
  EXPECT_DOUBLE_EQ(f.mean[idx("cor")], 0.0);
  EXPECT_TRUE(f.degenerate);
}

TEST(Glcm, MaskRestrictsPairs) {
  LevelImage img{4, 1, {1, 2, 3, 4}};
  const Mask mask{1, 1, 0, 1};
  std::size_t pairs = 0;
  const auto p = glcm_matrix(img, mask, 1, 0, &pairs);
  EXPECT_EQ(pairs, 1u);
  EXPECT_DOUBLE_EQ(p[0 * kGlcmLevels + 1], 0.5);
  EXPECT_TRUE(glcm_features(LevelImage{2, 2, {1, 1, 1, 1}}, {}, 3).degenerate);
}

TEST(Lbp, BinCountsPerRadius) {
  EXPECT_EQ(lbp_bin_count(1), 10u);
  EXPECT_EQ(lbp_bin_count(2), 18u);
  EXPECT_EQ(lbp_bin_count(3), 26u);
  std::mt19937_64 rng(6);
  const auto img = test::random_image(12, 12, rng);
  for (int r = 1; r <= 3; ++r) EXPECT_EQ(lbp_histogram(img, {}, r).bins.size(), lbp_bin_count(r));
}

TEST(Lbp, HistogramSumsToOne) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = test::random_image(10 + trial, 9 + trial % 5, rng);
    for (int r = 1; r <= 3; ++r) {
      const auto h = lbp_histogram(img, {}, r);
      double s = 0;
      for (double b : h.bins) s += b;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Lbp, MatchesNaiveOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = test::random_image(15, 13, rng);
    for (int r = 1; r <= 3; ++r) {
      const auto h = lbp_histogram(img, {}, r);
      const auto expect = naive_lbp(img, r);
      for (std::size_t b = 0; b < expect.size(); ++b) EXPECT_NEAR(h.bins[b], expect[b], 1e-12) << "r " << r;
    }
  }
}

TEST(Lbp, ExactlyInvariantUnderQuarterTurn) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = test::random_image(11 + trial % 7, 14 + trial % 3, rng);
    const auto rot = rotate90(img);
    for (int r = 1; r <= 3; ++r) {
      const auto a = lbp_histogram(img, {}, r);
      const auto b = lbp_histogram(rot, {}, r);
      for (std::size_t k = 0; k < a.bins.size(); ++k) EXPECT_EQ(a.bins[k], b.bins[k]) << "trial " << trial;
    }
  }
}

TEST(Lbp, FlatImageIsAllOnesCode) {
  const Image flat(9, 9, 0.25);
  const auto h = lbp_histogram(flat, {}, 2);
  EXPECT_DOUBLE_EQ(h.bins[16], 1.0);
  EXPECT_TRUE(lbp_histogram(Image(2, 2, 0.0), {}, 1).degenerate);
}

TEST(Laws, ConstantImageGivesZeroResponses) {
  const Image flat(20, 20, 3.7);
  const auto f = laws_features(flat, {});
  for (std::size_t k = 0; k < kLawsCount; ++k) {
    EXPECT_EQ(f.mean[k], 0.0) << laws_names()[k];
    EXPECT_EQ(f.std[k], 0.0) << laws_names()[k];
  }
  EXPECT_FALSE(f.degenerate);
}

TEST(Laws, MatchesNaiveConvolution) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const auto img = test::random_image(20, 20, rng, -2.0, 5.0);
    const auto f = laws_features(img, {});
    for (std::size_t k = 0; k < kLawsCount; ++k) {
      const auto resp = naive_laws_response(img, std::string(laws_names()[k]));
      double mean = 0;
      for (double v : resp) mean += v;
      mean /= static_cast<double>(resp.size());
      double var = 0;
      for (double v : resp) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(resp.size()));
      EXPECT_NEAR(f.mean[k], mean, 1e-9 * std::max(1.0, std::abs(mean))) << laws_names()[k];
      EXPECT_NEAR(f.std[k], sd, 1e-9 * std::max(1.0, sd)) << laws_names()[k];
    }
  }
}

TEST(Laws, KernelsAreSymmetrisedOuterProducts) {
  const auto k = laws_kernel(0);  // L5E5
  const auto l = laws_vec('L'), e = laws_vec('E');
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 5; ++u) EXPECT_DOUBLE_EQ(k[v * 5 + u], 0.5 * (l[v] * e[u] + e[v] * l[u]));
  EXPECT_EQ(laws_names().size(), kLawsCount);
  EXPECT_TRUE(laws_features(Image(14, 30, 1.0), {}).degenerate);
}

TEST(Autocorrelation, MatchesPearsonOracle) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto img = test::random_image(9 + trial % 4, 8 + trial % 3, rng);
    for (int d = 1; d <= 3; ++d) {
      const auto f = autocorrelation_features(img, {}, d);
      const auto steps = glcm_steps(d);
      for (std::size_t dir = 0; dir < 4; ++dir)
        EXPECT_NEAR(f.per_direction[dir], naive_autocorr(img, steps[dir][0], steps[dir][1]), 1e-9);
    }
  }
}

TEST(Autocorrelation, StripesCorrelateAtTheirPeriod) {
  Image stripes(24, 16);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 24; ++x) stripes.at(x, y) = std::sin(2 * std::numbers::pi * x / 4.0) + 0.3 * (x % 4 == 1);
  EXPECT_NEAR(directional_autocorrelation(stripes, {}, 4, 0), 1.0, 1e-12);
  EXPECT_NEAR(directional_autocorrelation(stripes, {}, 0, -3), 1.0, 1e-12);
  const auto f = autocorrelation_features(stripes, {}, 4);
  EXPECT_NEAR(f.mean, 1.0, 1e-12);
  EXPECT_NEAR(f.range, 0.0, 1e-12);
}

TEST(Autocorrelation, ValuesBoundedAndConstantDegenerate) {
  std::mt19937_64 rng(13);
  const auto img = test::random_image(10, 10, rng);
  for (int d = 1; d <= 3; ++d) {
    const auto f = autocorrelation_features(img, {}, d);
    for (double v : f.per_direction) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
  bool degen = false;
  EXPECT_EQ(directional_autocorrelation(Image(6, 6, 2.0), {}, 1, 0, &degen), 0.0);
  EXPECT_TRUE(degen);
}
