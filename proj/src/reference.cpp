#include "ckl/reference.hpp"

#include <stdexcept>

namespace ckl::reference {

Matrix gram(const KernelParams& params, const DataMatrix& X) {
  return reference::gram_cross(params, X, X);
}

Matrix gram_cross(const KernelParams& params, const DataMatrix& A, const DataMatrix& B) {
  Matrix K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = eval_kernel(params, row_span(A, i), row_span(B, j));
  }
  return K;
}

Matrix center(const Matrix& K) {
  const Eigen::Index n = K.rows();
  const Matrix C = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  return C * K * C;
}

double frob_inner(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw std::invalid_argument("frob_inner: shape mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) s += A(i, j) * B(i, j);
  }
  return s;
}

double inner_objective(std::span<const double> sigma, const Matrix& P, const DataMatrix& X, KernelFamily family,
                       Penalty penalty) {
  const KernelParams params{family, {sigma.begin(), sigma.end()}};
  double s = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) s += P(i, j) * eval_kernel(params, row_span(X, i), row_span(X, j));
  }
  return s - penalty(sigma);
}

}  // namespace ckl::reference
