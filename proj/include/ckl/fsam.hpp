#pragma once

#include <iosfwd>
#include <vector>

#include "ckl/alignment.hpp"
#include "ckl/kernels.hpp"
#include "ckl/optimizer.hpp"

namespace ckl {

/// Non-negative combination sum_i mu_i k_{sigma_i} of one family.
struct KernelCombination {
  struct Term {
    std::vector<double> sigma;
    double mu = 0.0;
    bool operator==(const Term&) const = default;
  };

  KernelFamily family = KernelFamily::GaussianShared;
  std::vector<Term> terms;

  [[nodiscard]] bool empty() const noexcept { return terms.empty(); }
  /// Drops zero-weight terms.
  [[nodiscard]] KernelCombination pruned() const;
  /// Sums the weights of terms with identical parameters (first occurrence
  /// keeps its position).
  [[nodiscard]] KernelCombination merged() const;
  /// Weights divided by their sum.
  [[nodiscard]] KernelCombination normalized() const;
  /// mu-weighted mean of all parameter components.
  [[nodiscard]] double weighted_mean_sigma() const;

  bool operator==(const KernelCombination&) const = default;
};

struct LearnerConfig {
  std::size_t max_iterations = 50;  // T
  double epsilon = 1e-10;           // K0 = epsilon * I
  double theta = 1e-3;              // minimum accepted gain in F
  double eta_max = 1.0;
  double lambda = 0.0;              // shrinkage of sigma towards its mean
  KernelFamily family = KernelFamily::GaussianShared;
  SearchSpace space;
  RestartSchedule schedule;
  NelderMeadOptions simplex;

  void validate(std::size_t dim) const;

  /// Defaults for a family on inputs of dimension `dim`: the box and restart
  /// schedule from SearchSpace::defaults and RestartSchedule::defaults.
  static LearnerConfig defaults(KernelFamily family, std::size_t dim);
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<double> sigma;
  double inner_value = 0.0;       // <P, K(sigma*)> minus any penalty
  double best_start_value = 0.0;  // inner objective at the best restart start
  double eta = 0.0;
  double f_before = 0.0;
  double f_after = 0.0;
  double seconds = 0.0;
  bool accepted = false;
  double centering_residual = 0.0;  // |C P C - P|_F / |P|_F
};

struct FitTrace {
  double initial_f = 0.0;
  std::vector<IterationRecord> records;

  void write_csv(std::ostream& out) const;
};

struct FitResult {
  KernelCombination combination;
  FitTrace trace;
};

/// Forward stagewise maximization of the centered alignment between the
/// learned kernel and the ideal kernel YY^T.
///
/// Each iteration moves along the base kernel whose centered Gram matrix best
/// matches the gradient of F at the current centered combination, with a
/// closed-form step in [0, eta_max]. The loop stops after T iterations or when
/// an iteration gains no more than theta; that last iteration is recorded in
/// the trace but not added to the combination. The epsilon * I initializer is
/// never part of the returned combination.
FitResult fit_ca(const DataMatrix& X, const Labels& y, const LearnerConfig& config);

/// Centered Gram matrix of epsilon * I + sum_i mu_i k_{sigma_i} on X.
Matrix centered_state(const DataMatrix& X, const KernelCombination& combination, double epsilon);

/// Uncentered Gram matrix of the combination on the rows of X.
GramMatrix evaluate_combination(const KernelCombination& combination, const DataMatrix& X);
/// Cross Gram: rows of `rows` against rows of `cols` (|rows| x |cols|).
Matrix evaluate_combination(const KernelCombination& combination, const DataMatrix& cols, const DataMatrix& rows);

}  // namespace ckl
