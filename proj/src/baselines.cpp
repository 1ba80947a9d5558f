#include "ckl/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "ckl/errors.hpp"

namespace ckl {

void KernelGrid::validate(std::size_t dim) const {
  if (sigmas.empty()) throw std::invalid_argument("kernel grid is empty");
  for (std::size_t i = 0; i < sigmas.size(); ++i) params(i).validate(dim);
}

KernelGrid KernelGrid::from_values(KernelFamily family, const std::vector<double>& values) {
  KernelGrid grid{family, {}};
  for (double v : values) grid.sigmas.push_back({v});
  return grid;
}

KernelGrid KernelGrid::linear(KernelFamily family, double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("kernel grid: count must be positive");
  std::vector<double> values;
  for (std::size_t i = 0; i < count; ++i) {
    values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return from_values(family, values);
}

KernelGrid KernelGrid::geometric(KernelFamily family, double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("kernel grid: count must be positive");
  if (!(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("kernel grid: geometric range must be positive");
  std::vector<double> values;
  const double ratio = count == 1 ? 1.0 : std::pow(hi / lo, 1.0 / static_cast<double>(count - 1));
  for (std::size_t i = 0; i < count; ++i) values.push_back(lo * std::pow(ratio, static_cast<double>(i)));
  return from_values(family, values);
}

KernelCombination fit_uniform(const KernelGrid& grid) {
  if (grid.sigmas.empty()) throw std::invalid_argument("fit_uniform: kernel grid is empty");
  KernelCombination comb{grid.family, {}};
  const double mu = 1.0 / static_cast<double>(grid.size());
  for (const auto& s : grid.sigmas) comb.terms.push_back({s, mu});
  return comb;
}

double discrete_alignment(const Vector& mu, const Matrix& gram_products, const Vector& target_products,
                          double target_norm) {
  const double sq = mu.dot(gram_products * mu);
  if (!(sq > 0.0)) throw DegenerateAlignmentError("discrete alignment: combined centered kernel is zero");
  return target_products.dot(mu) / (std::sqrt(sq) * target_norm);
}

Vector align_discrete_weights(const std::vector<Matrix>& centered_grams, const TargetKernel& target,
                              const DiscreteAlignmentOptions& options) {
  const auto p = static_cast<Eigen::Index>(centered_grams.size());
  if (p == 0) throw std::invalid_argument("align_discrete_weights: no kernels");
  Matrix M(p, p);
  Vector a(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i) = frob_inner(centered_grams[static_cast<std::size_t>(i)], target.centered.entries());
    for (Eigen::Index j = i; j < p; ++j) {
      M(i, j) = M(j, i) = frob_inner(centered_grams[static_cast<std::size_t>(i)], centered_grams[static_cast<std::size_t>(j)]);
    }
  }
  const double tn = target.norm_c;
  const auto value = [&](const Vector& mu) { return discrete_alignment(mu, M, a, tn); };

  Vector mu = Vector::Constant(p, 1.0 / std::sqrt(static_cast<double>(p)));
  if (p == 1) return mu;
  double current = value(mu);
  double step = 1.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Vector Mmu = M * mu;
    const double s = std::sqrt(mu.dot(Mmu));
    const Vector grad = (a / s - (a.dot(mu) / (s * s * s)) * Mmu) / tn;
    const double gn = grad.norm();
    if (!(gn > 0.0)) break;
    bool moved = false;
    double next_value = current;
    Vector next;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      Vector cand = (mu + (step / gn) * grad).cwiseMax(0.0);
      const double norm = cand.norm();
      if (!(norm > 0.0)) continue;
      cand /= norm;
      if (!(cand.dot(M * cand) > 0.0)) continue;
      const double v = value(cand);
      if (v > current) {
        next = std::move(cand);
        next_value = v;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const double gain = (next_value - current) / std::max(std::abs(current), 1e-300);
    mu = std::move(next);
    current = next_value;
    step = std::min(2.0 * step, 1.0);
    if (gain < options.min_relative_gain) break;
  }
  return mu;
}

KernelCombination fit_align_discrete(const KernelGrid& grid, const DataMatrix& X, const Labels& y,
                                     const DiscreteAlignmentOptions& options) {
  grid.validate(static_cast<std::size_t>(X.cols()));
  const TargetKernel target = ideal_kernel(y);
  std::vector<Matrix> grams;
  grams.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grams.push_back(center(gram(grid.params(i), X).entries()));
  const Vector mu = align_discrete_weights(grams, target, options);
  KernelCombination comb{grid.family, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) comb.terms.push_back({grid.sigmas[i], mu(static_cast<Eigen::Index>(i))});
  return comb;
}

KernelParams best_single(const KernelGrid& grid, const DataMatrix& X, const Labels& y, const DataMatrix& X_val,
                         const Labels& y_val, const std::vector<double>& c_grid) {
  grid.validate(static_cast<std::size_t>(X.cols()));
  if (X_val.rows() == 0) throw std::invalid_argument("best_single: empty validation set");
  std::size_t best = 0;
  double best_error = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const KernelParams params = grid.params(i);
    const auto sel = holdout_select_c(gram(params, X).entries(), y, gram_cross(params, X_val, X), y_val, c_grid);
    if (i == 0 || sel.validation_error_pct < best_error) {
      best = i;
      best_error = sel.validation_error_pct;
    }
  }
  return grid.params(best);
}

}  // namespace ckl
