#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "canopy/classifiers.hpp"
#include "canopy/error.hpp"
#include "canopy/group_lasso.hpp"
#include "canopy/parallel.hpp"
#include "canopy/random_forest.hpp"
#include "canopy/svm.hpp"

using namespace canopy;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

Data xor_clusters(std::size_t per_cluster, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.15);
  Data d{Matrix(4 * per_cluster, 2), {}};
  const double cx[4] = {-1, 1, -1, 1}, cy[4] = {-1, 1, 1, -1};
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < per_cluster; ++i) {
      const std::size_t r = c * per_cluster + i;
      d.x(r, 0) = cx[c] + n(rng);
      d.x(r, 1) = cy[c] + n(rng);
      d.y.push_back(c < 2 ? 0 : 1);
    }
  return d;
}

Data blobs(std::size_t per_class, std::size_t classes, std::size_t features, double spread, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  Data d{Matrix(per_class * classes, features), {}};
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t r = c * per_class + i;
      for (std::size_t j = 0; j < features; ++j) d.x(r, j) = (j == c % features ? 3.0 : 0.0) + n(rng);
      d.y.push_back(static_cast<int>(c));
    }
  return d;
}

// Best training accuracy of any single-feature threshold rule.
double best_stump_accuracy(const Data& d) {
  double best = 0.0;
  for (std::size_t j = 0; j < d.x.cols(); ++j)
    for (std::size_t t = 0; t < d.x.rows(); ++t) {
      const double thr = d.x(t, j);
      std::size_t agree = 0;
      for (std::size_t r = 0; r < d.x.rows(); ++r) agree += (d.x(r, j) <= thr) == (d.y[r] == 0);
      const double acc = static_cast<double>(std::max(agree, d.x.rows() - agree)) / static_cast<double>(d.x.rows());
      best = std::max(best, acc);
    }
  return best;
}

// Weighted Gini impurity of a two-way split, summed over sides.
double split_impurity(const Data& d, std::span<const double> w, std::size_t feat, double thr, std::size_t k) {
  std::vector<double> l(k, 0.0), r(k, 0.0);
  for (std::size_t i = 0; i < d.x.rows(); ++i) (d.x(i, feat) <= thr ? l : r)[static_cast<std::size_t>(d.y[i])] += w[i];
  auto side = [](const std::vector<double>& c) {
    const double t = std::accumulate(c.begin(), c.end(), 0.0);
    if (t <= 0.0) return 0.0;
    double s = 0.0;
    for (double v : c) s += (v / t) * (v / t);
    return t * (1.0 - s);
  };
  return side(l) + side(r);
}

Matrix probe_grid() {
  Matrix p(121, 2);
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j) {
      p(i * 11 + j, 0) = -1.5 + 0.3 * static_cast<double>(i);
      p(i * 11 + j, 1) = -1.5 + 0.3 * static_cast<double>(j);
    }
  return p;
}

}  // namespace

TEST(Standardizer, TwoPointColumnAndTrainingMoments) {
  Matrix x(2, 1);
  x(0, 0) = 1.0;
  x(1, 0) = 3.0;
  const auto s = Standardizer::fit(x);
  const auto z = s.apply(x);
  EXPECT_NEAR(z(0, 0), -0.70710678118654752, 1e-12);
  EXPECT_NEAR(z(1, 0), 0.70710678118654752, 1e-12);

  const auto d = blobs(30, 3, 5, 2.0, 1);
  Matrix wide(d.x.rows(), 6);
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    for (std::size_t c = 0; c < 5; ++c) wide(r, c) = 10.0 * d.x(r, c) + 4.0;
    wide(r, 5) = 7.0;
  }
  const auto ws = Standardizer::fit(wide);
  EXPECT_EQ(ws.constant_count(), 1u);
  const auto wz = ws.apply(wide);
  const double n = static_cast<double>(wz.rows());
  for (std::size_t c = 0; c < 5; ++c) {
    double m = 0.0, v = 0.0;
    for (std::size_t r = 0; r < wz.rows(); ++r) m += wz(r, c);
    m /= n;
    for (std::size_t r = 0; r < wz.rows(); ++r) v += (wz(r, c) - m) * (wz(r, c) - m);
    EXPECT_LT(std::abs(m), 1e-9);
    EXPECT_NEAR(v / (n - 1.0), 1.0, 1e-9);
  }
  for (std::size_t r = 0; r < wz.rows(); ++r) EXPECT_EQ(wz(r, 5), 0.0);
  EXPECT_THROW(Standardizer::fit(Matrix(0, 3)), ValidationError);
}

TEST(ClassWeights, InverseFrequencyNormalised) {
  const std::vector<int> y{0, 0, 0, 0, 1, 2, 2, 0};
  const auto w = class_weights(y, 4);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_DOUBLE_EQ(w[0] * 5, w[1] * 1);
  EXPECT_DOUBLE_EQ(w[2] * 2, w[1] * 1);
  EXPECT_EQ(w[3], 0.0);
  EXPECT_NEAR(w[0] * 5 + w[1] * 1 + w[2] * 2, 8.0, 1e-12);
  const auto sw = sample_weights(y, w);
  EXPECT_NEAR(std::accumulate(sw.begin(), sw.end(), 0.0), 8.0, 1e-12);
}

TEST(Helpers, ArgmaxTiesAndAccuracy) {
  EXPECT_EQ(argmax(std::vector<double>{0.2, 0.5, 0.5, 0.1}), 1u);
  const std::vector<int> t{0, 1, 1, 2}, p{0, 1, 2, 2};
  EXPECT_DOUBLE_EQ(accuracy(t, p), 0.75);
  const std::vector<double> w{1, 1, 2, 0};
  EXPECT_DOUBLE_EQ(weighted_accuracy(t, p, w), 0.5);
  EXPECT_EQ(count_classes(t), 3u);
}

TEST(Helpers, StratifiedGroupFoldsBalanceClasses) {
  std::vector<int> group_class;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 20 + 7 * c; ++i) group_class.push_back(c);
  const auto folds = stratified_group_folds(group_class, 5, 11);
  EXPECT_EQ(folds, stratified_group_folds(group_class, 5, 11));
  for (int c = 0; c < 3; ++c) {
    std::map<int, int> per_fold;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (group_class[g] == c) ++per_fold[folds[g]];
    ASSERT_EQ(per_fold.size(), 5u);
    int lo = 1 << 20, hi = 0;
    for (auto [f, n] : per_fold) lo = std::min(lo, n), hi = std::max(hi, n);
    EXPECT_LE(hi - lo, 1) << "class " << c;
  }
}

TEST(Smo, KktHoldsOnRandomProblems) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto d = xor_clusters(15, seed);
    const auto k = rbf_kernel(squared_distances(d.x, d.x), 0.7);
    std::vector<std::size_t> rows(d.x.rows());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> y, cost;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y.push_back(d.y[i] == 0 ? 1.0 : -1.0);
      cost.push_back(d.y[i] == 0 ? 2.0 : 0.5);
    }
    const KernelView view{&k, rows};
    const auto r = smo_solve(view, y, cost, 1e-4);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(smo_kkt_violation(view, y, cost, r), 1e-3);
    double balance = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_GE(r.alpha[i], 0.0);
      EXPECT_LE(r.alpha[i], cost[i] + 1e-12);
      balance += r.alpha[i] * y[i];
    }
    EXPECT_NEAR(balance, 0.0, 1e-9);
  }
}

TEST(Svm, XorIsSeparableOnlyNonlinearly) {
  const auto d = xor_clusters(25, 3);
  EXPECT_LE(best_stump_accuracy(d), 0.75);
  SvmConfig cfg = SvmConfig::defaults();
  cfg.seed = 4;
  const auto w = sample_weights(d.y, class_weights(d.y, 2));
  const auto m = fit_svm_rbf(d.x, d.y, w, 2, cfg);
  EXPECT_DOUBLE_EQ(accuracy(d.y, m.predict(d.x).labels), 1.0);
  EXPECT_FALSE(m.grid.empty());
  EXPECT_GT(m.c, 0.0);
  EXPECT_GT(m.gamma, 0.0);
}

TEST(Svm, SeparableBlobsAtEveryGridPoint) {
  const auto d = blobs(20, 2, 2, 0.3, 5);
  const auto w = sample_weights(d.y, class_weights(d.y, 2));
  const auto sq = squared_distances(d.x, d.x);
  const auto cfg = SvmConfig::defaults();
  for (double c : cfg.c_grid) {
    if (c < 1.0) continue;
    for (double g : cfg.gamma_grid) {
      const double gamma = g / 2.0;
      const auto m = train_svm_fixed(d.x, rbf_kernel(sq, gamma), d.y, w, 2, c, gamma, 1e-4);
      EXPECT_DOUBLE_EQ(accuracy(d.y, m.predict(d.x).labels), 1.0) << "C=" << c << " gamma=" << gamma;
    }
  }
}

TEST(Svm, DuplicatedRowsWithHalvedWeightsKeepDecisionFunction) {
  const auto d = xor_clusters(10, 6);
  const std::vector<double> w(d.y.size(), 1.0);
  Data dd{Matrix(2 * d.x.rows(), 2), {}};
  for (std::size_t r = 0; r < d.x.rows(); ++r)
    for (std::size_t k = 0; k < 2; ++k) {
      dd.x(2 * r + k, 0) = d.x(r, 0);
      dd.x(2 * r + k, 1) = d.x(r, 1);
      dd.y.push_back(d.y[r]);
    }
  const std::vector<double> half(dd.y.size(), 0.5);
  const auto a = train_svm_fixed(d.x, rbf_kernel(squared_distances(d.x, d.x), 1.0), d.y, w, 2, 4.0, 1.0, 1e-10);
  const auto b = train_svm_fixed(dd.x, rbf_kernel(squared_distances(dd.x, dd.x), 1.0), dd.y, half, 2, 4.0, 1.0, 1e-10);
  const auto probe = probe_grid();
  const auto da = a.pair_decisions(probe), db = b.pair_decisions(probe);
  for (std::size_t i = 0; i < probe.rows(); ++i) EXPECT_NEAR(da(i, 0), db(i, 0), 1e-6) << "probe " << i;
}

TEST(Svm, MulticlassVotes) {
  const auto d = blobs(15, 4, 4, 0.4, 7);
  SvmConfig cfg = SvmConfig::defaults();
  cfg.tune = false;
  const auto m = fit_svm_rbf(d.x, d.y, {}, 4, cfg);
  EXPECT_EQ(m.pairs.size(), 6u);
  const auto p = m.predict(d.x);
  EXPECT_DOUBLE_EQ(accuracy(d.y, p.labels), 1.0);
  for (std::size_t r = 0; r < p.scores.rows(); ++r) {
    const auto row = p.scores.row(r);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(RandomForest, RootSplitMatchesExhaustiveGiniSearch) {
  const auto d = blobs(25, 3, 4, 1.5, 8);
  const auto w = sample_weights(d.y, class_weights(d.y, 3));
  const std::vector<std::uint32_t> counts(d.y.size(), 1);
  const auto tree = grow_tree(d.x, d.y, w, counts, 3, 4, 1);
  ASSERT_GE(tree.nodes.size(), 3u);
  double best = 1e300;
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> v;
    for (std::size_t r = 0; r < d.x.rows(); ++r) v.push_back(d.x(r, j));
    std::sort(v.begin(), v.end());
    for (std::size_t t = 0; t + 1 < v.size(); ++t)
      if (v[t] < v[t + 1]) best = std::min(best, split_impurity(d, w, j, v[t], 3));
  }
  const auto& root = tree.nodes[0];
  EXPECT_NEAR(split_impurity(d, w, static_cast<std::size_t>(root.feature), root.threshold, 3), best, 1e-9);
}

TEST(RandomForest, PerfectPredictorAndPurity) {
  auto d = blobs(20, 3, 6, 2.0, 9);
  for (std::size_t r = 0; r < d.x.rows(); ++r) d.x(r, 5) = d.y[r];
  RandomForestConfig cfg;
  cfg.seed = 3;
  const auto m = fit_random_forest(d.x, d.y, {}, 3, cfg);
  EXPECT_EQ(m.trees.size(), 500u);
  EXPECT_EQ(m.mtry, 2u);
  EXPECT_DOUBLE_EQ(accuracy(d.y, m.predict(d.x).labels), 1.0);
}

TEST(RandomForest, IdenticalAcrossRunsAndWorkers) {
  const auto d = blobs(20, 3, 5, 2.0, 10);
  RandomForestConfig cfg;
  cfg.n_trees = 60;
  cfg.seed = 77;
  const std::size_t before = worker_count();
  set_worker_count(1);
  const auto a = fit_random_forest(d.x, d.y, {}, 3, cfg);
  set_worker_count(4);
  const auto b = fit_random_forest(d.x, d.y, {}, 3, cfg);
  set_worker_count(before);
  const auto pa = a.predict(d.x), pb = b.predict(d.x);
  EXPECT_EQ(pa.labels, pb.labels);
  EXPECT_TRUE(std::equal(pa.scores.data().begin(), pa.scores.data().end(), pb.scores.data().begin()));
  EXPECT_EQ(a.oob_accuracy, b.oob_accuracy);
}

TEST(RandomForest, NoiseGivesChanceOutOfBagAccuracy) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    Data d{Matrix(200, 5), {}};
    for (std::size_t r = 0; r < 200; ++r) {
      for (std::size_t c = 0; c < 5; ++c) d.x(r, c) = n(rng);
      d.y.push_back(static_cast<int>(r % 2));
    }
    RandomForestConfig cfg;
    cfg.seed = seed;
    const auto m = fit_random_forest(d.x, d.y, {}, 2, cfg);
    EXPECT_GE(m.oob_accuracy, 0.35) << "seed " << seed;
    EXPECT_LE(m.oob_accuracy, 0.65) << "seed " << seed;
  }
}

TEST(RandomForest, SingleClassRejected) {
  const auto d = blobs(10, 1, 2, 1.0, 11);
  EXPECT_THROW(fit_random_forest(d.x, d.y, {}, 1), ValidationError);
}

TEST(GroupLasso, LambdaMaxGivesNullModel) {
  const auto d = blobs(30, 3, 6, 1.0, 12);
  std::vector<int> y = d.y;
  for (std::size_t i = 0; i < 10; ++i) y[i] = 1;  // class 1 now has the largest weighted prior
  const std::vector<double> w(y.size(), 1.0);
  const double lmax = group_lasso_lambda_max(d.x, y, w, 3);
  GroupLassoModel m;
  m.n_classes = 3;
  m.coef = Matrix(6, 3);
  m.intercept.assign(3, 0.0);
  group_lasso_solve(d.x, y, w, lmax * 1.0001, GroupLassoConfig{}, m);
  for (double v : m.coef.data()) EXPECT_EQ(v, 0.0);
  const auto p = m.predict(d.x);
  for (int label : p.labels) EXPECT_EQ(label, 1);
  group_lasso_solve(d.x, y, w, lmax * 0.8, GroupLassoConfig{}, m);
  EXPECT_GT(std::count_if(m.coef.data().begin(), m.coef.data().end(), [](double v) { return v != 0.0; }), 0);
}

TEST(GroupLasso, SelectsTheInformativeFeature) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  Data d{Matrix(120, 10), {}};
  for (std::size_t r = 0; r < 120; ++r) {
    const int c = static_cast<int>(r % 2);
    for (std::size_t j = 0; j < 10; ++j) d.x(r, j) = n(rng);
    d.x(r, 3) += c == 0 ? -2.0 : 2.0;
    d.y.push_back(c);
  }
  const auto m = fit_group_lasso(d.x, d.y, {}, 2);
  EXPECT_NE(std::find(m.active.begin(), m.active.end(), 3u), m.active.end());
  EXPECT_GE(accuracy(d.y, m.predict(d.x).labels), 0.95);
}

TEST(GroupLasso, GroupSparsityBoundAndPathMonotone) {
  const auto d = blobs(12, 5, 40, 1.0, 14);
  GroupLassoConfig cfg;
  cfg.path_length = 40;
  const auto m = fit_group_lasso(d.x, d.y, {}, 5, cfg);
  EXPECT_LE(m.active.size(), 25u);
  for (std::size_t j = 0; j < m.coef.rows(); ++j) {
    const auto row = m.coef.row(j);
    const bool any = std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; });
    EXPECT_EQ(any, std::find(m.active.begin(), m.active.end(), j) != m.active.end()) << "feature " << j;
  }
  ASSERT_GE(m.path.size(), 2u);
  for (std::size_t i = 1; i < m.path.size(); ++i) {
    EXPECT_LT(m.path[i].lambda, m.path[i - 1].lambda);
    EXPECT_GE(m.path[i].active_groups, m.path[i - 1].active_groups) << "path point " << i;
  }
}

TEST(GroupLasso, ReplicatedClassWithScaledWeightKeepsOptimum) {
  const auto d = blobs(15, 3, 4, 1.2, 15);
  const std::vector<double> w(d.y.size(), 1.0);
  Data rep = d;
  std::vector<double> rw = w;
  // class 2 rows appear three times with a third of the weight
  for (std::size_t r = 0; r < d.x.rows(); ++r)
    if (d.y[r] == 2)
      for (int k = 0; k < 2; ++k) {
        rep.x.append_row(d.x.row(r));
        rep.y.push_back(2);
        rw.push_back(1.0);
      }
  for (std::size_t r = 0; r < rep.y.size(); ++r)
    if (rep.y[r] == 2) rw[r] = 1.0 / 3.0;
  const double lambda = 0.3 * group_lasso_lambda_max(d.x, d.y, w, 3);
  GroupLassoConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.max_sweeps = 50000;
  GroupLassoModel a, b;
  a.n_classes = b.n_classes = 3;
  a.coef = b.coef = Matrix(4, 3);
  a.intercept.assign(3, 0.0);
  b.intercept.assign(3, 0.0);
  group_lasso_solve(d.x, d.y, w, lambda, cfg, a);
  group_lasso_solve(rep.x, rep.y, rw, lambda, cfg, b);
  EXPECT_NEAR(group_lasso_objective(d.x, d.y, w, a.coef, a.intercept, lambda),
              group_lasso_objective(rep.x, rep.y, rw, b.coef, b.intercept, lambda), 1e-6);
}
