#include "canopy/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "canopy/error.hpp"
#include "canopy/hash.hpp"

namespace canopy {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 2) throw ValidationError("standardizer needs at least 2 rows");
  if (x.cols() == 0) throw ValidationError("standardizer needs at least 1 column");
  const std::size_t n = x.rows(), f = x.cols();
  Standardizer s;
  s.mean.assign(f, 0.0);
  s.scale.assign(f, 1.0);
  s.constant.assign(f, 0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < f; ++c) s.mean[c] += x(r, c);
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> ss(f, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < f; ++c) {
      const double d = x(r, c) - s.mean[c];
      ss[c] += d * d;
    }
  for (std::size_t c = 0; c < f; ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(n - 1));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean[c])))) {
      s.constant[c] = 1;
      s.scale[c] = 1.0;
    } else {
      s.scale[c] = sd;
    }
  }
  return s;
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const {
  if (in.size() != mean.size() || out.size() != mean.size())
    throw ValidationError("standardizer column count mismatch");
  for (std::size_t c = 0; c < mean.size(); ++c) out[c] = constant[c] ? 0.0 : (in[c] - mean[c]) / scale[c];
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) throw ValidationError("standardizer column count mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_row(x.row(r), out.row(r));
  return out;
}

std::size_t Standardizer::constant_count() const {
  return static_cast<std::size_t>(std::count(constant.begin(), constant.end(), std::uint8_t{1}));
}

std::vector<double> class_weights(std::span<const int> y, std::size_t n_classes) {
  std::vector<std::size_t> counts(n_classes, 0);
  for (int c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) throw ValidationError("class label out of range");
    ++counts[static_cast<std::size_t>(c)];
  }
  const std::size_t present = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t n) { return n > 0; }));
  std::vector<double> w(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c)
    if (counts[c] > 0)
      w[c] = static_cast<double>(y.size()) / (static_cast<double>(present) * static_cast<double>(counts[c]));
  return w;
}

std::vector<double> sample_weights(std::span<const int> y, std::span<const double> class_weight) {
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) w[i] = class_weight[static_cast<std::size_t>(y[i])];
  return w;
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::size_t count_classes(std::span<const int> y) {
  std::vector<int> seen(y.begin(), y.end());
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double weighted_accuracy(std::span<const int> truth, std::span<const int> predicted, std::span<const double> weights) {
  double hit = 0.0, total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    total += weights[i];
    if (truth[i] == predicted[i]) hit += weights[i];
  }
  return total > 0.0 ? hit / total : 0.0;
}

std::vector<int> stratified_group_folds(std::span<const int> group_class, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("fold count must be at least 2");
  int max_class = -1;
  for (int c : group_class) max_class = std::max(max_class, c);
  std::vector<int> fold(group_class.size(), -1);
  std::size_t cursor = 0;
  for (int c = 0; c <= max_class; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t g = 0; g < group_class.size(); ++g)
      if (group_class[g] == c) members.push_back(g);
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t g : members) {
      fold[g] = static_cast<int>(cursor % k);
      ++cursor;
    }
  }
  return fold;
}

void check_training_inputs(const Matrix& x, std::span<const int> y, std::span<const double> weights) {
  if (x.rows() == 0) throw ValidationError("empty training matrix");
  if (y.size() != x.rows()) throw ValidationError("label count does not match row count");
  if (!weights.empty() && weights.size() != x.rows()) throw ValidationError("weight count does not match row count");
  for (double v : x.data())
    if (!std::isfinite(v)) throw ValidationError("training matrix contains non-finite values");
  if (count_classes(y) < 2) throw ValidationError("training data must contain at least 2 classes");
}

}  // namespace canopy
