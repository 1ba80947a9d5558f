#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ckl {

/// Row-major so that every sample is a contiguous span of features.
using DataMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelFamily {
  GaussianShared,  // exp(-|x-y|^2 / s^2)
  GaussianPerDim,  // exp(-sum_k (x_k-y_k)^2 / s_k^2)
  Dirichlet1,      // 1 + 2 cos(s |x-y|)
};

std::string to_string(KernelFamily family);
KernelFamily family_from_string(const std::string& name);

/// Number of parameters a family takes for inputs of dimension `dim`.
std::size_t family_arity(KernelFamily family, std::size_t dim);

struct KernelParams {
  KernelFamily family = KernelFamily::GaussianShared;
  std::vector<double> sigma;

  /// Throws std::invalid_argument when sigma is out of domain or has the
  /// wrong length for inputs of dimension `dim`.
  void validate(std::size_t dim) const;
  /// Domain checks only (positivity / non-negativity).
  void validate_values() const;

  bool operator==(const KernelParams&) const = default;
};

/// Dense n x n matrix of kernel evaluations.
///
/// The centered flag is metadata: it records that the entries were produced
/// by `center` (or are known to have vanishing row and column sums).
class GramMatrix {
 public:
  GramMatrix() = default;
  explicit GramMatrix(Matrix entries, bool centered = false);

  static GramMatrix zeros(Eigen::Index n, bool centered = false);

  [[nodiscard]] const Matrix& entries() const noexcept { return entries_; }
  [[nodiscard]] bool centered() const noexcept { return centered_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return entries_.rows(); }
  [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
  bool centered_ = false;
};

double eval_kernel(const KernelParams& params, std::span<const double> x, std::span<const double> y);

/// Uncentered Gram matrix of `params` on the rows of `X`. OpenMP-parallel
/// over rows of the upper triangle.
GramMatrix gram(const KernelParams& params, const DataMatrix& X);

/// Cross Gram: rows of `A` against rows of `B` (|A| x |B|).
Matrix gram_cross(const KernelParams& params, const DataMatrix& A, const DataMatrix& B);

/// C_n K C_n with C_n = I - 11^T/n.
GramMatrix center(const GramMatrix& K);
Matrix center(const Matrix& K);

double frob_inner(const GramMatrix& A, const GramMatrix& B);
double frob_inner(const Matrix& A, const Matrix& B);
double frob_norm(const GramMatrix& A);
double frob_norm(const Matrix& A);

/// Entrywise sum of mu_i K_i. All weights must be non-negative and all
/// matrices must share shape and centered flag. An empty list yields the
/// n x n zero matrix.
GramMatrix combine(const std::vector<std::pair<double, GramMatrix>>& terms, Eigen::Index n);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& K);

/// True when min eigenvalue >= -rel_tol * ||K||_F.
bool is_psd(const Matrix& K, double rel_tol = 1e-8);

inline std::span<const double> row_span(const DataMatrix& X, Eigen::Index i) {
  return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

}  // namespace ckl
