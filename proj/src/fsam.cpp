#include "ckl/fsam.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ckl/errors.hpp"

namespace ckl {

KernelCombination KernelCombination::pruned() const {
  KernelCombination out{family, {}};
  for (const auto& t : terms) {
    if (t.mu > 0.0) out.terms.push_back(t);
  }
  return out;
}

KernelCombination KernelCombination::merged() const {
  KernelCombination out{family, {}};
  for (const auto& t : terms) {
    bool found = false;
    for (auto& o : out.terms) {
      if (o.sigma == t.sigma) {
        o.mu += t.mu;
        found = true;
        break;
      }
    }
    if (!found) out.terms.push_back(t);
  }
  return out;
}

KernelCombination KernelCombination::normalized() const {
  double total = 0.0;
  for (const auto& t : terms) total += t.mu;
  if (!(total > 0.0)) throw std::invalid_argument("normalized: combination has no weight");
  KernelCombination out = *this;
  for (auto& t : out.terms) t.mu /= total;
  return out;
}

double KernelCombination::weighted_mean_sigma() const {
  double num = 0.0;
  double den = 0.0;
  for (const auto& t : terms) {
    for (double s : t.sigma) {
      num += t.mu * s;
      den += t.mu;
    }
  }
  if (den <= 0.0) throw std::invalid_argument("weighted_mean_sigma: combination has no weight");
  return num / den;
}

void LearnerConfig::validate(std::size_t dim) const {
  if (max_iterations < 1) throw std::invalid_argument("learner: T must be at least 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("learner: epsilon must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("learner: theta must be non-negative");
  if (!(eta_max > 0.0)) throw std::invalid_argument("learner: eta_max must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("learner: lambda must be non-negative");
  space.validate(family);
  if (space.dim() != family_arity(family, dim)) throw std::invalid_argument("learner: box dimension mismatch");
  schedule.validate(space);
}

LearnerConfig LearnerConfig::defaults(KernelFamily family, std::size_t dim) {
  LearnerConfig config;
  config.family = family;
  config.space = SearchSpace::defaults(family, dim);
  config.schedule = RestartSchedule::defaults(family, config.space);
  return config;
}

void FitTrace::write_csv(std::ostream& out) const {
  std::size_t width = 0;
  for (const auto& r : records) width = std::max(width, r.sigma.size());
  out << "iteration,accepted";
  for (std::size_t k = 0; k < width; ++k) out << ",sigma_" << (k + 1);
  out << ",inner_value,eta,F,seconds\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.iteration << ',' << (r.accepted ? 1 : 0);
    for (std::size_t k = 0; k < width; ++k) {
      out << ',';
      if (k < r.sigma.size()) out << r.sigma[k];
    }
    out << ',' << r.inner_value << ',' << r.eta << ',' << r.f_after << ',' << r.seconds << '\n';
  }
}

Matrix centered_state(const DataMatrix& X, const KernelCombination& combination, double epsilon) {
  const Eigen::Index n = X.rows();
  Matrix K = center(Matrix(epsilon * Matrix::Identity(n, n)));
  for (const auto& t : combination.terms) {
    K.noalias() += t.mu * center(gram({combination.family, t.sigma}, X).entries());
  }
  return K;
}

FitResult fit_ca(const DataMatrix& X, const Labels& y, const LearnerConfig& config) {
  using Clock = std::chrono::steady_clock;
  if (X.rows() != y.size()) throw std::invalid_argument("fit_ca: X and y disagree on the sample count");
  if (X.rows() < 2) throw std::invalid_argument("fit_ca: need at least two samples");
  config.validate(static_cast<std::size_t>(X.cols()));

  const TargetKernel target = ideal_kernel(y);
  const Penalty penalty{config.lambda, config.lambda > 0.0};

  FitResult result;
  result.combination.family = config.family;
  Matrix Kc = centered_state(X, {}, config.epsilon);
  double f_prev = big_f(Kc, target);
  result.trace.initial_f = f_prev;

  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    const auto started = Clock::now();
    IterationRecord rec;
    rec.iteration = t;
    rec.f_before = f_prev;

    const Matrix grad = big_f_prime(Kc, target);
    const Matrix P = center(grad);
    const double pn = frob_norm(P);
    rec.centering_residual = pn > 0.0 ? frob_norm(Matrix(P - grad)) / pn : 0.0;

    const InnerObjective objective(P, X, config.family, penalty, config.space);
    MaximizeResult best;
    try {
      best = local_maximize([&](std::span<const double> s) { return objective(s); }, config.space, config.schedule,
                            config.simplex);
    } catch (const OptimizerFailure& e) {
      throw OptimizerFailure("fit_ca iteration " + std::to_string(t) + ": " + e.what());
    }
    rec.sigma = best.sigma;
    rec.inner_value = best.value;
    rec.best_start_value = best.best_start_value;

    const Matrix Kp = center(gram({config.family, best.sigma}, X).entries());
    rec.eta = line_search_eta(step_products(Kc, Kp, target), config.eta_max);
    Matrix next = Kc;
    if (rec.eta > 0.0) next.noalias() += rec.eta * Kp;
    const double f_next = rec.eta > 0.0 ? big_f(next, target) : f_prev;
    rec.f_after = f_next;
    rec.accepted = f_next > f_prev + config.theta;
    rec.seconds = std::chrono::duration<double>(Clock::now() - started).count();
    result.trace.records.push_back(rec);
    if (!rec.accepted) break;

    result.combination.terms.push_back({best.sigma, rec.eta});
    Kc = std::move(next);
    f_prev = f_next;
  }
  result.combination = result.combination.pruned();
  return result;
}

namespace {

void require_terms(const KernelCombination& combination, std::size_t dim) {
  if (combination.empty()) throw std::invalid_argument("evaluate_combination: empty combination");
  for (const auto& t : combination.terms) {
    if (!(t.mu >= 0.0)) throw std::invalid_argument("evaluate_combination: negative weight");
    KernelParams{combination.family, t.sigma}.validate(dim);
  }
}

// Both single-parameter families depend on the pairwise distance only, so
// the distance table is built once and each term is an elementwise map.
Matrix evaluate_terms(const KernelCombination& combination, const DataMatrix& rows, const DataMatrix& cols,
                      bool symmetric) {
  const Eigen::Index m = rows.rows();
  const Eigen::Index n = cols.rows();
  Matrix out = Matrix::Zero(m, n);
  if (combination.family == KernelFamily::GaussianPerDim) {
    for (const auto& t : combination.terms) {
      const KernelParams params{combination.family, t.sigma};
      out.noalias() += t.mu * (symmetric ? gram(params, rows).entries() : gram_cross(params, rows, cols));
    }
    return out;
  }
  const bool dirichlet = combination.family == KernelFamily::Dirichlet1;
  std::vector<double> scale;
  for (const auto& t : combination.terms) {
    scale.push_back(dirichlet ? t.sigma[0] : 1.0 / (t.sigma[0] * t.sigma[0]));
  }
#pragma omp parallel for schedule(dynamic, 8) if (m >= 64)
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = symmetric ? i : 0; j < n; ++j) {
      const double sq = (rows.row(i) - cols.row(j)).squaredNorm();
      const double dist = dirichlet ? std::sqrt(sq) : sq;
      double v = 0.0;
      for (std::size_t k = 0; k < scale.size(); ++k) {
        const double mu = combination.terms[k].mu;
        v += dirichlet ? mu * (1.0 + 2.0 * std::cos(scale[k] * dist)) : mu * std::exp(-dist * scale[k]);
      }
      out(i, j) = v;
      if (symmetric) out(j, i) = v;
    }
  }
  return out;
}

}  // namespace

GramMatrix evaluate_combination(const KernelCombination& combination, const DataMatrix& X) {
  require_terms(combination, static_cast<std::size_t>(X.cols()));
  return GramMatrix(evaluate_terms(combination, X, X, true), false);
}

Matrix evaluate_combination(const KernelCombination& combination, const DataMatrix& cols, const DataMatrix& rows) {
  if (cols.cols() != rows.cols()) throw std::invalid_argument("evaluate_combination: dimension mismatch");
  require_terms(combination, static_cast<std::size_t>(cols.cols()));
  return evaluate_terms(combination, rows, cols, false);
}

}  // namespace ckl
