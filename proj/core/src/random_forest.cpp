#include "canopy/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"
#include "canopy/parallel.hpp"

namespace canopy {

namespace {

struct Split {
  std::int32_t feature = -1;
  float threshold = 0.0f;
  double score = -1.0;  // sum_c l_c^2 / W_L + sum_c r_c^2 / W_R
};

// Smallest float threshold t with a <= t < b, if any.
bool float_threshold(double a, double b, float& t) {
  t = static_cast<float>(0.5 * (a + b));
  while (static_cast<double>(t) < a) t = std::nextafter(t, std::numeric_limits<float>::infinity());
  return static_cast<double>(t) < b;
}

int leaf_label(std::span<const double> class_weight) { return static_cast<int>(argmax(class_weight)); }

}  // namespace

int DecisionTree::predict(std::span<const double> row) const {
  std::size_t n = 0;
  while (nodes[n].feature >= 0)
    n = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[n].feature)] <= static_cast<double>(nodes[n].threshold)
                                     ? nodes[n].left
                                     : nodes[n].right);
  return nodes[n].label;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

void RandomForestConfig::validate() const {
  if (n_trees == 0) throw ValidationError("random forest needs at least one tree");
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                       std::span<const std::uint32_t> counts, std::size_t n_classes, std::size_t mtry,
                       std::uint64_t seed) {
  const std::size_t f = x.cols();
  std::mt19937_64 rng(seed);
  std::vector<double> w(x.rows(), 0.0);
  std::vector<std::size_t> root;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (counts[i] > 0) {
      w[i] = counts[i] * (weights.empty() ? 1.0 : weights[i]);
      root.push_back(i);
    }

  DecisionTree tree;
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
  };
  std::vector<Pending> stack;
  tree.nodes.push_back({});
  stack.push_back({0, std::move(root)});

  std::vector<std::size_t> features(f);
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<double> left(n_classes), right(n_classes), total(n_classes);

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    std::fill(total.begin(), total.end(), 0.0);
    for (std::size_t r : job.rows) total[static_cast<std::size_t>(y[r])] += w[r];
    const std::size_t distinct = static_cast<std::size_t>(std::count_if(total.begin(), total.end(), [](double v) { return v > 0.0; }));
    tree.nodes[job.node].label = leaf_label(total);
    if (distinct <= 1) continue;

    double w_all = 0.0;
    for (double v : total) w_all += v;

    // Candidate features come in batches of mtry drawn without replacement;
    // a further batch is drawn only when a batch holds no usable split.
    std::iota(features.begin(), features.end(), std::size_t{0});
    std::size_t drawn = 0;
    Split best;
    while (best.feature < 0 && drawn < f) {
      const std::size_t batch_end = std::min(f, drawn + mtry);
      for (; drawn < batch_end; ++drawn) {
        std::uniform_int_distribution<std::size_t> pick(drawn, f - 1);
        std::swap(features[drawn], features[pick(rng)]);
        const std::size_t feat = features[drawn];
        order.clear();
        for (std::size_t r : job.rows) order.emplace_back(x(r, feat), r);
        std::sort(order.begin(), order.end());
        if (order.front().first == order.back().first) continue;
        std::fill(left.begin(), left.end(), 0.0);
        double wl = 0.0;
        for (std::size_t t = 0; t + 1 < order.size(); ++t) {
          const std::size_t r = order[t].second;
          left[static_cast<std::size_t>(y[r])] += w[r];
          wl += w[r];
          if (order[t].first == order[t + 1].first) continue;
          const double wr = w_all - wl;
          if (wl <= 0.0 || wr <= 0.0) continue;
          double sl = 0.0, sr = 0.0;
          for (std::size_t c = 0; c < n_classes; ++c) {
            sl += left[c] * left[c];
            const double rc = total[c] - left[c];
            sr += rc * rc;
          }
          const double score = sl / wl + sr / wr;
          if (score > best.score) {
            float thr;
            if (!float_threshold(order[t].first, order[t + 1].first, thr)) continue;
            best = {static_cast<std::int32_t>(feat), thr, score};
          }
        }
      }
    }
    if (best.feature < 0) continue;

    std::vector<std::size_t> lrows, rrows;
    for (std::size_t r : job.rows)
      (x(r, static_cast<std::size_t>(best.feature)) <= static_cast<double>(best.threshold) ? lrows : rrows).push_back(r);
    const auto li = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    TreeNode& node = tree.nodes[job.node];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = li;
    node.right = li + 1;
    stack.push_back({static_cast<std::size_t>(li + 1), std::move(rrows)});
    stack.push_back({static_cast<std::size_t>(li), std::move(lrows)});
  }
  return tree;
}

Prediction RandomForestModel::predict(const Matrix& x) const {
  Prediction out;
  out.scores = Matrix(x.rows(), n_classes);
  out.labels.resize(x.rows());
  const double norm = static_cast<double>(std::max<std::size_t>(1, trees.size()));
  parallel_for(x.rows(), [&](std::size_t i) {
    auto s = out.scores.row(i);
    for (const auto& t : trees) s[static_cast<std::size_t>(t.predict(x.row(i)))] += 1.0;
    for (double& v : s) v /= norm;
    out.labels[i] = static_cast<int>(argmax(s));
  });
  return out;
}

RandomForestModel fit_random_forest(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                                    std::size_t n_classes, const RandomForestConfig& cfg) {
  cfg.validate();
  check_training_inputs(x, y, weights);
  for (int c : y)
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) throw ValidationError("class label out of range");
  const std::size_t n = x.rows();
  RandomForestModel m;
  m.n_classes = n_classes;
  m.seed = cfg.seed;
  m.mtry = cfg.mtry > 0 ? std::min(cfg.mtry, x.cols())
                        : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
  m.trees.resize(cfg.n_trees);
  std::vector<std::vector<int>> oob(cfg.n_trees);
  parallel_for(cfg.n_trees, [&](std::size_t t) {
    const std::uint64_t tree_seed = mix_seed(cfg.seed, t);
    std::mt19937_64 rng(tree_seed);
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    std::vector<std::uint32_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[draw(rng)];
    m.trees[t] = grow_tree(x, y, weights, counts, n_classes, m.mtry, mix_seed(tree_seed, 1));
    oob[t].assign(n, -1);
    for (std::size_t i = 0; i < n; ++i)
      if (counts[i] == 0) oob[t][i] = m.trees[t].predict(x.row(i));
  });

  std::size_t scored = 0, hit = 0;
  std::vector<double> votes(n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(votes.begin(), votes.end(), 0.0);
    bool any = false;
    for (std::size_t t = 0; t < cfg.n_trees; ++t)
      if (oob[t][i] >= 0) {
        votes[static_cast<std::size_t>(oob[t][i])] += 1.0;
        any = true;
      }
    if (!any) continue;
    ++scored;
    hit += static_cast<int>(argmax(votes)) == y[i];
  }
  m.oob_accuracy = scored > 0 ? static_cast<double>(hit) / static_cast<double>(scored) : 0.0;
  return m;
}

}  // namespace canopy
