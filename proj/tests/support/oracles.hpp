#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ckl/alignment.hpp"
#include "ckl/data.hpp"
#include "ckl/kernels.hpp"

namespace oracle {

using ckl::Matrix;
using ckl::Vector;

// Symmetric matrix with N(0,1) entries.
inline Matrix random_symmetric(ckl::Rng& rng, Eigen::Index n) {
  Matrix A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) A(i, j) = A(j, i) = rng.normal();
  }
  return A;
}

// B B^T with B n x r Gaussian.
inline Matrix random_psd(ckl::Rng& rng, Eigen::Index n, Eigen::Index rank) {
  Matrix B(n, rank);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < rank; ++k) B(i, k) = rng.normal();
  }
  return B * B.transpose();
}

inline ckl::DataMatrix random_points(ckl::Rng& rng, Eigen::Index n, Eigen::Index d, double scale = 1.0) {
  ckl::DataMatrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) X(i, k) = scale * rng.normal();
  }
  return X;
}

// Random +-1 labels with both classes present.
inline ckl::Labels random_labels(ckl::Rng& rng, Eigen::Index n) {
  ckl::Labels y(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) y(i) = rng.uniform() < 0.5 ? 1.0 : -1.0;
  } while ((y.array() > 0).all() || (y.array() < 0).all());
  return y;
}

// F(K) straight from the definition, centering with explicit C_n.
inline double f_value(const Matrix& K, const ckl::Labels& y) {
  const Eigen::Index n = K.rows();
  const Matrix C = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix T = C * (y * y.transpose()) * C;
  return (K.cwiseProduct(T)).sum() / (K.norm() * T.norm());
}

// Euclidean projection onto {0 <= a <= C, y^T a = 0} by bisection on the
// multiplier of the equality constraint.
inline Vector project_dual(const Vector& v, const ckl::Labels& y, double c) {
  const auto at = [&](double nu) { return (v - nu * y).cwiseMax(0.0).cwiseMin(c).eval(); };
  double lo = -(v.cwiseAbs().maxCoeff() + c) - 1.0;
  double hi = -lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (y.dot(at(mid)) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return at(0.5 * (lo + hi));
}

// Slow accelerated projected-gradient solver of the SVM dual
//   max 1^T a - 1/2 a^T Q a,  Q = diag(y) K diag(y),
// run until the gradient mapping L |a - P(a + grad/L)| drops below 1e-8, the
// objective stalls, or the budget ends. The objective error is then at most
// about 1e-8 * C sqrt(n).
inline Vector svm_dual_pg(const Matrix& K, const ckl::Labels& y, double c, int max_iter = 2000000) {
  const Eigen::Index n = K.rows();
  const Matrix Q = y.asDiagonal() * K * y.asDiagonal();
  const double L = std::max(Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().maxCoeff(), 1e-12);
  const auto value = [&](const Vector& a) { return a.sum() - 0.5 * a.dot(Q * a); };
  Vector a = Vector::Zero(n);
  Vector z = a;
  double t = 1.0;
  double last = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    if (it % 50 == 0) {
      const Vector g = Vector::Ones(n) - Q * a;
      const double now = value(a);
      if (L * (a - project_dual(a + g / L, y, c)).norm() < 1e-8 || (it > 0 && now == last)) break;
      last = now;
    }
    const Vector grad = Vector::Ones(n) - Q * z;
    Vector next = project_dual(z + grad / L, y, c);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (value(next) < value(a)) {
      // restart momentum
      z = a;
      t = 1.0;
      continue;
    }
    z = next + ((t - 1.0) / t_next) * (next - a);
    a = std::move(next);
    t = t_next;
  }
  return a;
}

inline double svm_dual_value(const Matrix& K, const ckl::Labels& y, const Vector& a) {
  const Vector ay = a.cwiseProduct(y);
  return a.sum() - 0.5 * ay.dot(K * ay);
}

}  // namespace oracle
