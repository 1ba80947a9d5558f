#pragma once

#include <vector>

#include "ckl/alignment.hpp"
#include "ckl/kernels.hpp"

namespace ckl {

/// Soft-margin SVM on a precomputed kernel. `coef` holds alpha_i * y_i.
struct SvmModel {
  Vector alpha;  // in [0, C]
  Vector coef;   // alpha_i * y_i
  double bias = 0.0;
  std::vector<Eigen::Index> support_indices;
  double c = 0.0;
  std::size_t iterations = 0;
  double kkt_violation = 0.0;
};

struct SvmOptions {
  double tolerance = 1e-3;             // stop when the maximal KKT violation falls below
  std::size_t max_epochs = 100000;     // one epoch = n pair updates
  bool check_psd = true;
};

/// SMO on the dual  max sum(alpha) - 1/2 alpha^T Q alpha,  Q_ij = y_i y_j K_ij,
/// subject to 0 <= alpha <= C and y^T alpha = 0. The first index of each pair
/// is the maximal KKT violator; the second maximizes the second-order gain.
///
/// A kernel failing the PSD check is retried once with 1e-8 * trace/n added
/// to the diagonal (with a warning on stderr) before giving up.
SvmModel train_svm(const Matrix& K, const Labels& y, double c, const SvmOptions& options = {});

/// Dual objective at alpha.
double svm_dual_objective(const Matrix& K, const Labels& y, const Vector& alpha);

/// sum_i coef_i K_cross(j, i) + bias for every row j.
Vector decision_function(const SvmModel& model, const Matrix& K_cross);

/// sign of the decision function; 0 maps to +1.
Labels predict(const SvmModel& model, const Matrix& K_cross);

/// Percentage of mismatched labels.
double error_rate_pct(const Labels& predicted, const Labels& truth);

/// 10^{-5, -4.5, ..., 5}.
std::vector<double> default_c_grid();

/// k-fold cross-validation (fold of sample i is i mod folds). Returns the C
/// with the lowest mean validation error; ties go to the smaller C. Each fold
/// is solved along the grid in ascending C, warm-started from the previous
/// solution.
double cv_select_c(const Matrix& K, const Labels& y, int folds, const std::vector<double>& c_grid = default_c_grid(),
                   const SvmOptions& options = {});

struct HoldoutSelection {
  double c = 0.0;
  double validation_error_pct = 0.0;
  SvmModel model;
};

/// Selects C on an explicit validation set; `K_val` is |val| x |train|.
/// Warm-started along ascending C like cv_select_c.
HoldoutSelection holdout_select_c(const Matrix& K_train, const Labels& y_train, const Matrix& K_val,
                                  const Labels& y_val, const std::vector<double>& c_grid = default_c_grid(),
                                  const SvmOptions& options = {});

}  // namespace ckl
