#pragma once

#include <vector>

#include "ckl/alignment.hpp"
#include "ckl/fsam.hpp"
#include "ckl/svm.hpp"

namespace ckl {

/// Finite dictionary of base kernels of one family.
struct KernelGrid {
  KernelFamily family = KernelFamily::GaussianShared;
  std::vector<std::vector<double>> sigmas;

  [[nodiscard]] std::size_t size() const noexcept { return sigmas.size(); }
  [[nodiscard]] KernelParams params(std::size_t i) const { return {family, sigmas[i]}; }
  void validate(std::size_t dim) const;

  static KernelGrid from_values(KernelFamily family, const std::vector<double>& values);
  /// `count` values from lo to hi, equally spaced or geometric.
  static KernelGrid linear(KernelFamily family, double lo, double hi, std::size_t count);
  static KernelGrid geometric(KernelFamily family, double lo, double hi, std::size_t count);
};

/// Uniform weights 1/|grid|.
KernelCombination fit_uniform(const KernelGrid& grid);

struct DiscreteAlignmentOptions {
  std::size_t max_iterations = 500;
  double min_relative_gain = 1e-8;
};

/// Weights maximizing the centered alignment of sum_i mu_i (K_i)_c with T_c
/// over mu >= 0, |mu|_2 = 1, by projected gradient ascent with backtracking
/// started from uniform weights. `centered_grams` must be centered.
Vector align_discrete_weights(const std::vector<Matrix>& centered_grams, const TargetKernel& target,
                              const DiscreteAlignmentOptions& options = {});

/// Alignment of sum_i mu_i (K_i)_c with T_c from precomputed products.
double discrete_alignment(const Vector& mu, const Matrix& gram_products, const Vector& target_products,
                          double target_norm);

KernelCombination fit_align_discrete(const KernelGrid& grid, const DataMatrix& X, const Labels& y,
                                     const DiscreteAlignmentOptions& options = {});

/// Grid member whose stage-two SVM (C chosen on the validation set) has the
/// lowest validation error; ties go to the first member.
KernelParams best_single(const KernelGrid& grid, const DataMatrix& X, const Labels& y, const DataMatrix& X_val,
                         const Labels& y_val, const std::vector<double>& c_grid = default_c_grid());

}  // namespace ckl
