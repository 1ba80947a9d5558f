#include "ckl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace ckl {

namespace {

constexpr double kTau = 1e-12;

void require_both_classes(const Labels& y) {
  bool pos = false;
  bool neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) == 1.0) {
      pos = true;
    } else if (y(i) == -1.0) {
      neg = true;
    } else {
      throw std::invalid_argument("svm: labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw std::invalid_argument("svm: training labels contain a single class");
}

// `start`, if given, must be dual feasible for this C.
SvmModel smo(const Matrix& K, const Labels& y, double c, const SvmOptions& options, const Vector* start = nullptr) {
  const Eigen::Index n = K.rows();
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);  // Q alpha - 1
  if (start != nullptr) {
    alpha = start->cwiseMax(0.0).cwiseMin(c);
    const Vector ay = alpha.cwiseProduct(y);
    grad = y.cwiseProduct(K * ay).array() - 1.0;
  }
  const Vector diag = K.diagonal();

  const auto in_up = [&](Eigen::Index t) { return y(t) > 0 ? alpha(t) < c : alpha(t) > 0; };
  const auto in_low = [&](Eigen::Index t) { return y(t) > 0 ? alpha(t) > 0 : alpha(t) < c; };

  const std::size_t max_iter = options.max_epochs * static_cast<std::size_t>(std::max<Eigen::Index>(n, 1));
  std::size_t iter = 0;
  double violation = 0.0;
  for (; iter < max_iter; ++iter) {
    Eigen::Index i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t)) gmin = std::min(gmin, v);
    }
    violation = i < 0 ? 0.0 : gmax - gmin;
    if (i < 0 || violation < options.tolerance) break;

    Eigen::Index j = -1;
    double best_gain = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double b = gmax + y(t) * grad(t);
      if (b <= 0.0) continue;
      double a = diag(i) + diag(t) - 2.0 * K(i, t);
      if (a <= 0.0) a = kTau;
      const double gain = -(b * b) / a;
      if (gain <= best_gain) {
        best_gain = gain;
        j = t;
      }
    }
    if (j < 0) break;

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double qij = y(i) * y(j) * K(i, j);
    if (y(i) != y(j)) {
      double quad = diag(i) + diag(j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = diag(i) + diag(j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double di = (alpha(i) - old_i) * y(i);
    const double dj = (alpha(j) - old_j) * y(j);
    // G_k += y_k y_i K_ki d_alpha_i + y_k y_j K_kj d_alpha_j
    grad.array() += y.array() * (K.col(i).array() * di + K.col(j).array() * dj);
  }

  SvmModel model;
  model.c = c;
  model.iterations = iter;
  model.kkt_violation = violation;

  double free_sum = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= c) {
      if (y(t) < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha(t) <= 0) {
      if (y(t) > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  model.bias = -rho;
  model.alpha = alpha;
  model.coef = alpha.cwiseProduct(y);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0) model.support_indices.push_back(t);
  }
  return model;
}

Matrix submatrix(const Matrix& K, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = K(rows[r], cols[c]);
    }
  }
  return out;
}

Labels subvector(const Labels& y, const std::vector<Eigen::Index>& idx) {
  Labels out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) out(static_cast<Eigen::Index>(r)) = y(idx[r]);
  return out;
}

// Lowest error, ties to the smaller C.
std::size_t pick_best(const std::vector<double>& errors, const std::vector<double>& c_grid) {
  std::size_t best = 0;
  for (std::size_t g = 1; g < errors.size(); ++g) {
    if (errors[g] < errors[best] || (errors[g] == errors[best] && c_grid[g] < c_grid[best])) best = g;
  }
  return best;
}

void require_grid(const std::vector<double>& c_grid) {
  if (c_grid.empty()) throw std::invalid_argument("C grid is empty");
  for (double c : c_grid) {
    if (!(c > 0.0)) throw std::invalid_argument("C grid values must be positive");
  }
}

// Solves for every C in ascending order, each warm-started from the previous
// solution scaled by C / C_prev, which stays feasible.
template <typename Sink>
void solve_path(const Matrix& K, const Labels& y, const std::vector<double>& c_grid, const SvmOptions& options,
                Sink sink) {
  std::vector<std::size_t> order(c_grid.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c_grid[a] < c_grid[b]; });
  Vector start;
  double prev_c = 0.0;
  for (std::size_t g : order) {
    const double c = c_grid[g];
    if (prev_c > 0.0) start *= c / prev_c;
    SvmModel model = smo(K, y, c, options, prev_c > 0.0 ? &start : nullptr);
    start = model.alpha;
    prev_c = c;
    sink(g, std::move(model));
  }
}

}  // namespace

SvmModel train_svm(const Matrix& K, const Labels& y, double c, const SvmOptions& options) {
  if (K.rows() != K.cols() || K.rows() != y.size()) throw std::invalid_argument("train_svm: shape mismatch");
  if (!(c > 0.0)) throw std::invalid_argument("train_svm: C must be positive");
  require_both_classes(y);
  if (options.check_psd && !is_psd(K)) {
    const double jitter = 1e-8 * K.trace() / static_cast<double>(K.rows());
    std::cerr << "warning: train_svm: kernel matrix is not PSD within tolerance; adding " << jitter
              << " to the diagonal\n";
    Matrix jittered = K;
    jittered.diagonal().array() += jitter;
    if (!is_psd(jittered)) throw std::invalid_argument("train_svm: kernel matrix is not positive semidefinite");
    return smo(jittered, y, c, options);
  }
  return smo(K, y, c, options);
}

double svm_dual_objective(const Matrix& K, const Labels& y, const Vector& alpha) {
  const Vector ay = alpha.cwiseProduct(y);
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

Vector decision_function(const SvmModel& model, const Matrix& K_cross) {
  if (K_cross.cols() != model.coef.size()) throw std::invalid_argument("decision_function: shape mismatch");
  return (K_cross * model.coef).array() + model.bias;
}

Labels predict(const SvmModel& model, const Matrix& K_cross) {
  const Vector f = decision_function(model, K_cross);
  return f.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

double error_rate_pct(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("error_rate_pct: size mismatch");
  if (truth.size() == 0) return 0.0;
  const auto wrong = (predicted.array() != truth.array()).count();
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(truth.size());
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int k = -10; k <= 10; ++k) grid.push_back(std::pow(10.0, 0.5 * k));
  return grid;
}

double cv_select_c(const Matrix& K, const Labels& y, int folds, const std::vector<double>& c_grid,
                   const SvmOptions& options) {
  if (folds < 2) throw std::invalid_argument("cv_select_c: need at least two folds");
  if (K.rows() != y.size()) throw std::invalid_argument("cv_select_c: shape mismatch");
  require_grid(c_grid);
  if (c_grid.size() == 1) return c_grid.front();
  if (options.check_psd && !is_psd(K)) throw std::invalid_argument("cv_select_c: kernel matrix is not PSD");
  SvmOptions inner = options;
  inner.check_psd = false;

  std::vector<std::vector<Eigen::Index>> train(static_cast<std::size_t>(folds));
  std::vector<std::vector<Eigen::Index>> val(static_cast<std::size_t>(folds));
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (int f = 0; f < folds; ++f) (i % folds == f ? val : train)[static_cast<std::size_t>(f)].push_back(i);
  }
  for (int f = 0; f < folds; ++f) {
    if (!val[static_cast<std::size_t>(f)].empty()) require_both_classes(subvector(y, train[static_cast<std::size_t>(f)]));
  }

  std::vector<std::vector<double>> fold_errors(static_cast<std::size_t>(folds), std::vector<double>(c_grid.size()));
#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < folds; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    if (val[fi].empty()) continue;
    const Matrix Kt = submatrix(K, train[fi], train[fi]);
    const Matrix Kv = submatrix(K, val[fi], train[fi]);
    const Labels yt = subvector(y, train[fi]);
    const Labels yv = subvector(y, val[fi]);
    solve_path(Kt, yt, c_grid, inner, [&](std::size_t g, SvmModel model) {
      fold_errors[fi][g] = error_rate_pct(predict(model, Kv), yv);
    });
  }
  std::vector<double> errors(c_grid.size(), 0.0);
  for (const auto& fe : fold_errors) {
    for (std::size_t g = 0; g < c_grid.size(); ++g) errors[g] += fe[g] / folds;
  }
  return c_grid[pick_best(errors, c_grid)];
}

HoldoutSelection holdout_select_c(const Matrix& K_train, const Labels& y_train, const Matrix& K_val,
                                  const Labels& y_val, const std::vector<double>& c_grid, const SvmOptions& options) {
  if (K_val.cols() != K_train.rows() || K_val.rows() != y_val.size()) {
    throw std::invalid_argument("holdout_select_c: shape mismatch");
  }
  require_grid(c_grid);
  require_both_classes(y_train);
  Matrix K = K_train;
  if (options.check_psd && !is_psd(K)) {
    const double jitter = 1e-8 * K.trace() / static_cast<double>(K.rows());
    std::cerr << "warning: holdout_select_c: kernel matrix is not PSD within tolerance; adding " << jitter
              << " to the diagonal\n";
    K.diagonal().array() += jitter;
    if (!is_psd(K)) throw std::invalid_argument("holdout_select_c: kernel matrix is not positive semidefinite");
  }
  std::vector<SvmModel> models(c_grid.size());
  std::vector<double> errors(c_grid.size());
  solve_path(K, y_train, c_grid, options, [&](std::size_t g, SvmModel model) {
    errors[g] = error_rate_pct(predict(model, K_val), y_val);
    models[g] = std::move(model);
  });
  const std::size_t best = pick_best(errors, c_grid);
  return {c_grid[best], errors[best], std::move(models[best])};
}

}  // namespace ckl
