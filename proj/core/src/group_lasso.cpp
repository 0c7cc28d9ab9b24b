#include "canopy/group_lasso.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/error.hpp"

namespace canopy {

namespace {

struct Problem {
  std::size_t n = 0, f = 0, k = 0;
  Matrix xt;  // f x n
  std::span<const int> y;
  std::vector<double> omega;  // weights normalized to sum 1
  std::vector<double> lipschitz;
};

Problem make_problem(const Matrix& x, std::span<const int> y, std::span<const double> weights, std::size_t k) {
  Problem p;
  p.n = x.rows();
  p.f = x.cols();
  p.k = k;
  p.y = y;
  p.xt = Matrix(p.f, p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = 0; j < p.f; ++j) p.xt(j, i) = x(i, j);
  p.omega.assign(p.n, 1.0);
  if (!weights.empty()) std::copy(weights.begin(), weights.end(), p.omega.begin());
  double total = 0.0;
  for (double w : p.omega) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("sample weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("sample weights sum to zero");
  for (double& w : p.omega) w /= total;
  p.lipschitz.assign(p.f, 0.0);
  for (std::size_t j = 0; j < p.f; ++j) {
    double s = 0.0;
    const auto col = p.xt.row(j);
    for (std::size_t i = 0; i < p.n; ++i) s += p.omega[i] * col[i] * col[i];
    p.lipschitz[j] = 0.5 * s;
  }
  return p;
}

void softmax_row(std::span<const double> eta, std::span<double> prob) {
  double m = eta[0];
  for (double e : eta) m = std::max(m, e);
  double s = 0.0;
  for (std::size_t c = 0; c < eta.size(); ++c) {
    prob[c] = std::exp(eta[c] - m);
    s += prob[c];
  }
  for (double& v : prob) v /= s;
}

struct State {
  Matrix eta;   // n x k
  Matrix prob;  // n x k

  void init(const Problem& p, const GroupLassoModel& m) {
    eta = Matrix(p.n, p.k);
    prob = Matrix(p.n, p.k);
    for (std::size_t i = 0; i < p.n; ++i) {
      auto e = eta.row(i);
      for (std::size_t c = 0; c < p.k; ++c) e[c] = m.intercept[c];
    }
    for (std::size_t j = 0; j < p.f; ++j) {
      const auto b = m.coef.row(j);
      if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) continue;
      const auto col = p.xt.row(j);
      for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t c = 0; c < p.k; ++c) eta(i, c) += col[i] * b[c];
    }
    for (std::size_t i = 0; i < p.n; ++i) softmax_row(eta.row(i), prob.row(i));
  }

  double loss(const Problem& p) const {
    double l = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) l -= p.omega[i] * std::log(std::max(prob(i, static_cast<std::size_t>(p.y[i])), 1e-300));
    return l;
  }
};

void group_gradient(const Problem& p, const State& s, std::size_t j, std::span<double> g) {
  std::fill(g.begin(), g.end(), 0.0);
  const auto col = p.xt.row(j);
  for (std::size_t i = 0; i < p.n; ++i) {
    const double wx = p.omega[i] * col[i];
    if (wx == 0.0) continue;
    const auto pr = s.prob.row(i);
    for (std::size_t c = 0; c < p.k; ++c) g[c] += wx * pr[c];
    g[static_cast<std::size_t>(p.y[i])] -= wx;
  }
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double penalty(const Matrix& coef) {
  double s = 0.0;
  for (std::size_t j = 0; j < coef.rows(); ++j) s += norm2(coef.row(j));
  return s;
}

// Proximal block step on group j. Returns true when the group changed.
bool update_group(const Problem& p, State& s, GroupLassoModel& m, std::size_t j, double lambda, std::span<double> g) {
  const double lj = p.lipschitz[j];
  if (lj <= 0.0) return false;
  group_gradient(p, s, j, g);
  auto b = m.coef.row(j);
  std::vector<double> z(p.k);
  for (std::size_t c = 0; c < p.k; ++c) z[c] = b[c] - g[c] / lj;
  const double zn = norm2(z);
  const double shrink = zn > 0.0 ? std::max(0.0, 1.0 - lambda / (lj * zn)) : 0.0;
  std::vector<double> delta(p.k);
  bool changed = false;
  for (std::size_t c = 0; c < p.k; ++c) {
    const double nb = shrink * z[c];
    delta[c] = nb - b[c];
    changed = changed || delta[c] != 0.0;
    b[c] = nb;
  }
  if (!changed) return false;
  const auto col = p.xt.row(j);
  for (std::size_t i = 0; i < p.n; ++i) {
    if (col[i] == 0.0) continue;
    auto e = s.eta.row(i);
    for (std::size_t c = 0; c < p.k; ++c) e[c] += col[i] * delta[c];
    softmax_row(e, s.prob.row(i));
  }
  return true;
}

void update_intercept(const Problem& p, State& s, GroupLassoModel& m) {
  std::vector<double> g(p.k, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) {
    const auto pr = s.prob.row(i);
    for (std::size_t c = 0; c < p.k; ++c) g[c] += p.omega[i] * pr[c];
    g[static_cast<std::size_t>(p.y[i])] -= p.omega[i];
  }
  std::vector<double> delta(p.k);
  for (std::size_t c = 0; c < p.k; ++c) {
    delta[c] = -g[c] / 0.5;
    m.intercept[c] += delta[c];
  }
  for (std::size_t i = 0; i < p.n; ++i) {
    auto e = s.eta.row(i);
    for (std::size_t c = 0; c < p.k; ++c) e[c] += delta[c];
    softmax_row(e, s.prob.row(i));
  }
}

void check_inputs(const Matrix& x, std::span<const int> y, std::span<const double> weights, std::size_t k) {
  check_training_inputs(x, y, weights);
  for (int c : y)
    if (c < 0 || static_cast<std::size_t>(c) >= k) throw ValidationError("class label out of range");
}

void solve(const Problem& p, State& s, double lambda, const GroupLassoConfig& cfg, GroupLassoModel& m) {
  std::vector<std::uint8_t> working(p.f, 0);
  for (std::size_t j = 0; j < p.f; ++j) {
    const auto b = m.coef.row(j);
    working[j] = std::any_of(b.begin(), b.end(), [](double v) { return v != 0.0; });
  }
  std::vector<double> g(p.k);
  double obj = s.loss(p) + lambda * penalty(m.coef);
  for (;;) {
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      update_intercept(p, s, m);
      for (std::size_t j = 0; j < p.f; ++j)
        if (working[j]) update_group(p, s, m, j, lambda, g);
      const double next = s.loss(p) + lambda * penalty(m.coef);
      const double rel = std::abs(obj - next) / std::max(1e-12, std::abs(next));
      obj = next;
      if (rel < cfg.tolerance) break;
    }
    bool added = false;
    for (std::size_t j = 0; j < p.f; ++j) {
      if (working[j] || p.lipschitz[j] <= 0.0) continue;
      group_gradient(p, s, j, g);
      if (norm2(g) > lambda * (1.0 + 1e-9)) {
        working[j] = 1;
        added = true;
      }
    }
    if (!added) break;
  }
}

void refresh_active(GroupLassoModel& m) {
  m.active.clear();
  for (std::size_t j = 0; j < m.coef.rows(); ++j) {
    const auto b = m.coef.row(j);
    if (std::any_of(b.begin(), b.end(), [](double v) { return v != 0.0; })) m.active.push_back(j);
  }
}

void init_null(const Problem& p, GroupLassoModel& m) {
  m.n_classes = p.k;
  m.coef = Matrix(p.f, p.k);
  std::vector<double> prior(p.k, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) prior[static_cast<std::size_t>(p.y[i])] += p.omega[i];
  m.intercept.assign(p.k, 0.0);
  for (std::size_t c = 0; c < p.k; ++c) m.intercept[c] = prior[c] > 0.0 ? std::log(prior[c]) : -50.0;
}

}  // namespace

void GroupLassoConfig::validate() const {
  if (max_groups == 0) throw ValidationError("group lasso max_groups must be positive");
  if (path_length < 2) throw ValidationError("group lasso path_length must be at least 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)) throw ValidationError("lambda_min_ratio must be in (0,1)");
  if (!(tolerance > 0.0)) throw ValidationError("group lasso tolerance must be positive");
}

Matrix GroupLassoModel::decision(const Matrix& x) const {
  if (x.cols() != coef.rows()) throw ValidationError("group lasso feature count mismatch");
  Matrix out(x.rows(), n_classes);
  std::vector<double> eta(n_classes);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::copy(intercept.begin(), intercept.end(), eta.begin());
    for (std::size_t j : active) {
      const double v = x(i, j);
      for (std::size_t c = 0; c < n_classes; ++c) eta[c] += v * coef(j, c);
    }
    softmax_row(eta, out.row(i));
  }
  return out;
}

Prediction GroupLassoModel::predict(const Matrix& x) const {
  Prediction p;
  p.scores = decision(x);
  p.labels.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) p.labels[i] = static_cast<int>(argmax(p.scores.row(i)));
  return p;
}

double group_lasso_objective(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                             const Matrix& coef, std::span<const double> intercept, double lambda) {
  const std::size_t k = intercept.size();
  double total = 0.0, loss = 0.0;
  std::vector<double> eta(k), prob(k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    std::copy(intercept.begin(), intercept.end(), eta.begin());
    for (std::size_t j = 0; j < x.cols(); ++j)
      for (std::size_t c = 0; c < k; ++c) eta[c] += x(i, j) * coef(j, c);
    softmax_row(eta, prob);
    loss -= w * std::log(std::max(prob[static_cast<std::size_t>(y[i])], 1e-300));
    total += w;
  }
  return loss / total + lambda * penalty(coef);
}

double group_lasso_lambda_max(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                              std::size_t n_classes) {
  check_inputs(x, y, weights, n_classes);
  const Problem p = make_problem(x, y, weights, n_classes);
  GroupLassoModel m;
  init_null(p, m);
  State s;
  s.init(p, m);
  std::vector<double> g(p.k);
  double lmax = 0.0;
  for (std::size_t j = 0; j < p.f; ++j) {
    group_gradient(p, s, j, g);
    lmax = std::max(lmax, norm2(g));
  }
  return lmax;
}

void group_lasso_solve(const Matrix& x, std::span<const int> y, std::span<const double> weights, double lambda,
                       const GroupLassoConfig& cfg, GroupLassoModel& model) {
  cfg.validate();
  check_inputs(x, y, weights, model.n_classes);
  const Problem p = make_problem(x, y, weights, model.n_classes);
  if (model.coef.rows() != p.f || model.intercept.size() != p.k) init_null(p, model);
  State s;
  s.init(p, model);
  solve(p, s, lambda, cfg, model);
  model.lambda = lambda;
  refresh_active(model);
}

GroupLassoModel fit_group_lasso(const Matrix& x, std::span<const int> y, std::span<const double> weights,
                                std::size_t n_classes, const GroupLassoConfig& cfg) {
  cfg.validate();
  check_inputs(x, y, weights, n_classes);
  const Problem p = make_problem(x, y, weights, n_classes);
  std::vector<double> w(p.n);
  for (std::size_t i = 0; i < p.n; ++i) w[i] = weights.empty() ? 1.0 : weights[i];

  GroupLassoModel cur;
  init_null(p, cur);
  State s;
  s.init(p, cur);
  std::vector<double> g(p.k);
  double lmax = 0.0;
  for (std::size_t j = 0; j < p.f; ++j) {
    group_gradient(p, s, j, g);
    lmax = std::max(lmax, norm2(g));
  }

  GroupLassoModel best;
  double best_acc = -1.0;
  std::vector<LassoPathPoint> path;
  for (std::size_t t = 0; t < cfg.path_length; ++t) {
    const double frac = static_cast<double>(t) / static_cast<double>(cfg.path_length - 1);
    const double lambda = lmax * std::pow(cfg.lambda_min_ratio, frac);
    if (t > 0 && lmax > 0.0) solve(p, s, lambda, cfg, cur);
    cur.lambda = lambda;
    refresh_active(cur);
    const auto pred = cur.predict(x);
    LassoPathPoint pt{lambda, cur.active.size(), weighted_accuracy(y, pred.labels, w),
                      s.loss(p) + lambda * penalty(cur.coef)};
    path.push_back(pt);
    if (pt.active_groups > cfg.max_groups) break;
    if (pt.weighted_accuracy > best_acc) {
      best_acc = pt.weighted_accuracy;
      best = cur;
      best.selected = path.size() - 1;
    }
    if (lmax <= 0.0) break;
  }
  best.path = std::move(path);
  return best;
}

}  // namespace canopy
