#include "canopy/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "canopy/error.hpp"
#include "canopy/log.hpp"
#include "canopy/parallel.hpp"

namespace canopy {

namespace {

constexpr double kTau = 1e-12;

bool at_upper(double a, double c) { return a >= c; }
bool at_lower(double a) { return a <= 0.0; }

struct PairFit {
  std::vector<std::size_t> rows;  // kernel rows of the binary problem
  SmoResult smo;
};

// Trains every one-vs-one pair over the kernel rows in `subset`.
std::vector<PairFit> fit_pairs(const Matrix& kernel, std::span<const std::size_t> subset, std::span<const int> y,
                               std::span<const double> weights, std::size_t n_classes, double c, double tolerance,
                               std::vector<std::pair<int, int>>& pairs) {
  std::vector<std::uint8_t> present(n_classes, 0);
  for (std::size_t r : subset) present[static_cast<std::size_t>(y[r])] = 1;
  pairs.clear();
  for (std::size_t a = 0; a < n_classes; ++a)
    for (std::size_t b = a + 1; b < n_classes; ++b)
      if (present[a] && present[b]) pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  std::vector<PairFit> fits(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    PairFit& fit = fits[p];
    std::vector<double> yy, cost;
    for (std::size_t r : subset) {
      if (y[r] != a && y[r] != b) continue;
      fit.rows.push_back(r);
      yy.push_back(y[r] == a ? 1.0 : -1.0);
      cost.push_back(c * (weights.empty() ? 1.0 : weights[r]));
    }
    fit.smo = smo_solve(KernelView{&kernel, fit.rows}, yy, cost, tolerance);
    if (!fit.smo.converged) log::warn("SMO hit its iteration limit for class pair " + std::to_string(a) + "/" + std::to_string(b));
  });
  return fits;
}

SvmModel assemble(const Matrix& x, std::span<const std::size_t> kernel_to_x, std::span<const int> y,
                  std::vector<PairFit>& fits, const std::vector<std::pair<int, int>>& pairs, std::size_t n_classes,
                  double c, double gamma) {
  SvmModel m;
  m.n_classes = n_classes;
  m.c = c;
  m.gamma = gamma;
  std::vector<std::size_t> sv_rows;
  for (const auto& f : fits)
    for (std::size_t i = 0; i < f.rows.size(); ++i)
      if (f.smo.alpha[i] > 0.0) sv_rows.push_back(f.rows[i]);
  std::sort(sv_rows.begin(), sv_rows.end());
  sv_rows.erase(std::unique(sv_rows.begin(), sv_rows.end()), sv_rows.end());
  std::vector<std::size_t> x_rows;
  for (std::size_t r : sv_rows) x_rows.push_back(kernel_to_x.empty() ? r : kernel_to_x[r]);
  m.support_vectors = x.select_rows(x_rows);
  for (std::size_t p = 0; p < fits.size(); ++p) {
    SvmPair pair;
    pair.class_a = pairs[p].first;
    pair.class_b = pairs[p].second;
    pair.bias = fits[p].smo.bias;
    for (std::size_t i = 0; i < fits[p].rows.size(); ++i) {
      const double a = fits[p].smo.alpha[i];
      if (a <= 0.0) continue;
      const std::size_t r = fits[p].rows[i];
      const auto it = std::lower_bound(sv_rows.begin(), sv_rows.end(), r);
      pair.support.push_back(static_cast<std::uint32_t>(it - sv_rows.begin()));
      pair.coef.push_back(a * (y[r] == pair.class_a ? 1.0 : -1.0));
    }
    m.pairs.push_back(std::move(pair));
  }
  return m;
}

Prediction vote(const Matrix& decisions, const std::vector<std::pair<int, int>>& pairs, std::size_t n_classes) {
  Prediction out;
  out.scores = Matrix(decisions.rows(), n_classes);
  out.labels.resize(decisions.rows());
  const double norm = pairs.empty() ? 1.0 : static_cast<double>(pairs.size());
  for (std::size_t i = 0; i < decisions.rows(); ++i) {
    auto s = out.scores.row(i);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const int winner = decisions(i, p) > 0.0 ? pairs[p].first : pairs[p].second;
      s[static_cast<std::size_t>(winner)] += 1.0;
    }
    for (double& v : s) v /= norm;
    out.labels[i] = static_cast<int>(argmax(s));
  }
  return out;
}

}  // namespace

SmoResult smo_solve(const KernelView& k, std::span<const double> y, std::span<const double> cost, double tolerance,
                    std::size_t max_iterations) {
  const std::size_t n = k.size();
  if (y.size() != n || cost.size() != n) throw ValidationError("SMO input sizes differ");
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(10'000'000, 100 * n);
  SmoResult r;
  r.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = k(i, i);
  auto& alpha = r.alpha;

  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!at_upper(alpha[t], cost[t]) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!at_lower(alpha[t]) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    if (i < n) {
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff;
        if (y[t] > 0) {
          if (at_lower(alpha[t])) continue;
          gmax2 = std::max(gmax2, grad[t]);
          grad_diff = gmax + grad[t];
        } else {
          if (at_upper(alpha[t], cost[t])) continue;
          gmax2 = std::max(gmax2, -grad[t]);
          grad_diff = gmax - grad[t];
        }
        if (grad_diff > 0.0) {
          double quad = diag[i] + diag[t] - 2.0 * k(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      }
    }
    if (i == n || j == n || gmax + gmax2 < tolerance) {
      r.converged = true;
      break;
    }

    const double ci = cost[i], cj = cost[j];
    const double old_i = alpha[i], old_j = alpha[j];
    const double kij = k(i, j);
    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * (y[i] * y[j] * kij);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * (y[i] * y[j] * kij);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * k(i, t) * di + y[j] * k(j, t) * dj);
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (at_upper(alpha[t], cost[t])) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (at_lower(alpha[t])) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  r.bias = -rho;
  return r;
}

double smo_kkt_violation(const KernelView& k, std::span<const double> y, std::span<const double> cost,
                         const SmoResult& r) {
  const std::size_t n = k.size();
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double f = r.bias;
    for (std::size_t s = 0; s < n; ++s)
      if (r.alpha[s] != 0.0) f += r.alpha[s] * y[s] * k(s, t);
    const double m = y[t] * f;
    double v;
    if (r.alpha[t] <= 0.0)
      v = std::max(0.0, 1.0 - m);
    else if (r.alpha[t] >= cost[t])
      v = std::max(0.0, m - 1.0);
    else
      v = std::abs(m - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ValidationError("distance operands differ in column count");
  Matrix d(a.rows(), b.rows());
  const bool same = &a == &b;
  parallel_for(a.rows(), [&](std::size_t i) {
    const auto ra = a.row(i);
    for (std::size_t j = same ? i + 1 : 0; j < b.rows(); ++j) {
      const auto rb = b.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < ra.size(); ++c) {
        const double t = ra[c] - rb[c];
        s += t * t;
      }
      d(i, j) = s;
    }
  });
  if (same)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < i; ++j) d(i, j) = d(j, i);
  return d;
}

Matrix rbf_kernel(const Matrix& sq_dist, double gamma) {
  Matrix k(sq_dist.rows(), sq_dist.cols());
  const auto src = sq_dist.data();
  auto dst = k.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::exp(-gamma * src[i]);
  return k;
}

SvmConfig SvmConfig::defaults() {
  SvmConfig c;
  for (int e = -2; e <= 6; ++e) c.c_grid.push_back(std::ldexp(1.0, e));
  for (int e = -7; e <= 1; ++e) c.gamma_grid.push_back(std::ldexp(1.0, e));
  return c;
}

void SvmConfig::validate() const {
  if (tune) {
    if (c_grid.empty() || gamma_grid.empty()) throw ValidationError("SVM tuning grid is empty");
    for (double v : c_grid)
      if (!(v > 0.0)) throw ValidationError("SVM C values must be positive");
    for (double v : gamma_grid)
      if (!(v > 0.0)) throw ValidationError("SVM gamma values must be positive");
    if (tune_folds < 2) throw ValidationError("SVM tune_folds must be at least 2");
  } else {
    if (!(c > 0.0)) throw ValidationError("SVM C must be positive");
    if (gamma < 0.0) throw ValidationError("SVM gamma must be non-negative");
  }
  if (!(tolerance > 0.0)) throw ValidationError("SVM tolerance must be positive");
}

Matrix SvmModel::pair_decisions(const Matrix& x) const {
  if (x.cols() != support_vectors.cols()) throw ValidationError("SVM feature count mismatch");
  Matrix out(x.rows(), pairs.size());
  parallel_for(x.rows(), [&](std::size_t i) {
    const auto row = x.row(i);
    std::vector<double> kv(support_vectors.rows());
    for (std::size_t s = 0; s < support_vectors.rows(); ++s) {
      const auto sv = support_vectors.row(s);
      double d = 0.0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const double t = row[c] - sv[c];
        d += t * t;
      }
      kv[s] = std::exp(-gamma * d);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      double f = pairs[p].bias;
      for (std::size_t s = 0; s < pairs[p].support.size(); ++s) f += pairs[p].coef[s] * kv[pairs[p].support[s]];
      out(i, p) = f;
    }
  });
  return out;
}

Prediction SvmModel::predict(const Matrix& x) const {
  std::vector<std::pair<int, int>> pp;
  for (const auto& p : pairs) pp.emplace_back(p.class_a, p.class_b);
  return vote(pair_decisions(x), pp, n_classes);
}

SvmModel train_svm_fixed(const Matrix& x, const Matrix& kernel, std::span<const int> y,
                         std::span<const double> weights, std::size_t n_classes, double c, double gamma,
                         double tolerance) {
  check_training_inputs(x, y, weights);
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::pair<int, int>> pairs;
  auto fits = fit_pairs(kernel, all, y, weights, n_classes, c, tolerance, pairs);
  return assemble(x, {}, y, fits, pairs, n_classes, c, gamma);
}

SvmModel fit_svm_rbf(const Matrix& x, std::span<const int> y, std::span<const double> weights, std::size_t n_classes,
                     const SvmConfig& cfg, std::span<const int> groups) {
  cfg.validate();
  check_training_inputs(x, y, weights);
  if (!groups.empty() && groups.size() != x.rows()) throw ValidationError("group count does not match row count");
  const double f = static_cast<double>(x.cols());
  const Matrix dist = squared_distances(x, x);

  double best_c = cfg.c;
  double best_gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / f;
  std::vector<SvmTuneRecord> grid;
  if (cfg.tune) {
    // Internal folds over groups (or rows), stratified by class.
    std::vector<int> unit_of(x.rows());
    std::vector<int> unit_class;
    if (groups.empty()) {
      for (std::size_t r = 0; r < x.rows(); ++r) {
        unit_of[r] = static_cast<int>(r);
        unit_class.push_back(y[r]);
      }
    } else {
      std::vector<int> ids(groups.begin(), groups.end());
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      unit_class.assign(ids.size(), -1);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto u = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), groups[r]) - ids.begin());
        unit_of[r] = static_cast<int>(u);
        if (unit_class[u] < 0) unit_class[u] = y[r];
      }
    }
    const auto unit_fold = stratified_group_folds(unit_class, cfg.tune_folds, cfg.seed);
    std::vector<int> row_fold(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) row_fold[r] = unit_fold[static_cast<std::size_t>(unit_of[r])];

    std::vector<std::size_t> class_total(n_classes, 0);
    for (int c : y) ++class_total[static_cast<std::size_t>(c)];
    std::vector<std::uint8_t> fold_ok(cfg.tune_folds, 1);
    std::vector<std::vector<std::size_t>> train_rows(cfg.tune_folds), test_rows(cfg.tune_folds);
    for (std::size_t k = 0; k < cfg.tune_folds; ++k) {
      std::vector<std::size_t> counts(n_classes, 0);
      for (std::size_t r = 0; r < x.rows(); ++r) {
        if (row_fold[r] == static_cast<int>(k)) {
          test_rows[k].push_back(r);
        } else {
          train_rows[k].push_back(r);
          ++counts[static_cast<std::size_t>(y[r])];
        }
      }
      for (std::size_t c = 0; c < n_classes; ++c)
        if (class_total[c] > 0 && counts[c] < 2) fold_ok[k] = 0;
      if (test_rows[k].empty()) fold_ok[k] = 0;
      if (!fold_ok[k]) log::warn("SVM tuning fold " + std::to_string(k) + " skipped: a class has fewer than 2 training rows");
    }

    grid.resize(cfg.c_grid.size() * cfg.gamma_grid.size());
    for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi) {
      const double gamma = cfg.gamma_grid[gi] / f;
      const Matrix kernel = rbf_kernel(dist, gamma);
      for (std::size_t ci = 0; ci < cfg.c_grid.size(); ++ci) {
        const double c = cfg.c_grid[ci];
        SvmTuneRecord rec{c, gamma, 0.0, 0};
        for (std::size_t k = 0; k < cfg.tune_folds; ++k) {
          if (!fold_ok[k]) continue;
          std::vector<std::pair<int, int>> pairs;
          auto fits = fit_pairs(kernel, train_rows[k], y, weights, n_classes, c, cfg.tolerance, pairs);
          Matrix dec(test_rows[k].size(), pairs.size());
          for (std::size_t p = 0; p < fits.size(); ++p)
            for (std::size_t t = 0; t < test_rows[k].size(); ++t) {
              double v = fits[p].smo.bias;
              const auto& fr = fits[p].rows;
              for (std::size_t s = 0; s < fr.size(); ++s) {
                const double a = fits[p].smo.alpha[s];
                if (a == 0.0) continue;
                v += a * (y[fr[s]] == pairs[p].first ? 1.0 : -1.0) * kernel(fr[s], test_rows[k][t]);
              }
              dec(t, p) = v;
            }
          const auto pred = vote(dec, pairs, n_classes);
          std::vector<int> truth;
          std::vector<double> w;
          for (std::size_t r : test_rows[k]) {
            truth.push_back(y[r]);
            w.push_back(weights.empty() ? 1.0 : weights[r]);
          }
          rec.accuracy += weighted_accuracy(truth, pred.labels, w);
          ++rec.folds_used;
        }
        if (rec.folds_used > 0) rec.accuracy /= static_cast<double>(rec.folds_used);
        grid[ci * cfg.gamma_grid.size() + gi] = rec;
      }
    }
    double best_acc = -1.0;
    for (const auto& rec : grid)
      if (rec.folds_used > 0 && rec.accuracy > best_acc) {
        best_acc = rec.accuracy;
        best_c = rec.c;
        best_gamma = rec.gamma;
      }
    if (best_acc < 0.0) {
      log::warn("SVM tuning had no usable folds; falling back to C=1, gamma=1/f");
      best_c = 1.0;
      best_gamma = 1.0 / f;
    }
  }

  const Matrix kernel = rbf_kernel(dist, best_gamma);
  SvmModel m = train_svm_fixed(x, kernel, y, weights, n_classes, best_c, best_gamma, cfg.tolerance);
  m.grid = std::move(grid);
  return m;
}

}  // namespace canopy
