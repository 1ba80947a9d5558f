#include "ckl/kernels.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ckl {

namespace {

constexpr Eigen::Index kParallelMin = 64;

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::GaussianShared:
      return "gaussian";
    case KernelFamily::GaussianPerDim:
      return "gaussian-per-dim";
    case KernelFamily::Dirichlet1:
      return "dirichlet";
  }
  return "unknown";
}

KernelFamily family_from_string(const std::string& name) {
  if (name == "gaussian" || name == "gaussian-shared") return KernelFamily::GaussianShared;
  if (name == "gaussian-per-dim" || name == "gaussian-nd") return KernelFamily::GaussianPerDim;
  if (name == "dirichlet") return KernelFamily::Dirichlet1;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

std::size_t family_arity(KernelFamily family, std::size_t dim) {
  return family == KernelFamily::GaussianPerDim ? dim : 1;
}

void KernelParams::validate_values() const {
  if (sigma.empty()) throw std::invalid_argument("kernel parameter vector is empty");
  for (double s : sigma) {
    if (!std::isfinite(s)) throw std::invalid_argument("kernel parameter is not finite");
    if (family == KernelFamily::Dirichlet1) {
      if (s < 0.0) throw std::invalid_argument("Dirichlet frequency must be non-negative");
    } else if (s <= 0.0) {
      throw std::invalid_argument("Gaussian bandwidth must be strictly positive");
    }
  }
}

void KernelParams::validate(std::size_t dim) const {
  validate_values();
  if (sigma.size() != family_arity(family, dim)) {
    throw std::invalid_argument("kernel parameter vector has length " + std::to_string(sigma.size()) +
                                ", expected " + std::to_string(family_arity(family, dim)) + " for " +
                                to_string(family));
  }
}

GramMatrix::GramMatrix(Matrix entries, bool centered) : entries_(std::move(entries)), centered_(centered) {
  if (entries_.rows() != entries_.cols()) throw std::invalid_argument("Gram matrix must be square");
}

GramMatrix GramMatrix::zeros(Eigen::Index n, bool centered) {
  return GramMatrix(Matrix::Zero(n, n), centered);
}

double eval_kernel(const KernelParams& params, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("eval_kernel: dimension mismatch");
  params.validate(x.size());
  switch (params.family) {
    case KernelFamily::GaussianShared: {
      const double s = params.sigma[0];
      return std::exp(-squared_distance(x, y) / (s * s));
    }
    case KernelFamily::GaussianPerDim: {
      double e = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = (x[k] - y[k]) / params.sigma[k];
        e += diff * diff;
      }
      return std::exp(-e);
    }
    case KernelFamily::Dirichlet1:
      return 1.0 + 2.0 * std::cos(params.sigma[0] * std::sqrt(squared_distance(x, y)));
  }
  return 0.0;
}

namespace {

// Evaluates the kernel without re-validating; callers validate once.
struct KernelEvaluator {
  const KernelParams& params;
  std::vector<double> inv_sq;  // 1/s_k^2 for the Gaussian families

  explicit KernelEvaluator(const KernelParams& p) : params(p) {
    if (p.family != KernelFamily::Dirichlet1) {
      inv_sq.reserve(p.sigma.size());
      for (double s : p.sigma) inv_sq.push_back(1.0 / (s * s));
    }
  }

  double operator()(const double* x, const double* y, std::size_t d) const {
    switch (params.family) {
      case KernelFamily::GaussianShared: {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = x[k] - y[k];
          s += diff * diff;
        }
        return std::exp(-s * inv_sq[0]);
      }
      case KernelFamily::GaussianPerDim: {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = x[k] - y[k];
          s += diff * diff * inv_sq[k];
        }
        return std::exp(-s);
      }
      case KernelFamily::Dirichlet1: {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = x[k] - y[k];
          s += diff * diff;
        }
        return 1.0 + 2.0 * std::cos(params.sigma[0] * std::sqrt(s));
      }
    }
    return 0.0;
  }
};

}  // namespace

GramMatrix gram(const KernelParams& params, const DataMatrix& X) {
  const Eigen::Index n = X.rows();
  const auto d = static_cast<std::size_t>(X.cols());
  if (n < 1) throw std::invalid_argument("gram: need at least one sample");
  params.validate(d);
  const KernelEvaluator k(params);
  Matrix K(n, n);
  const double* base = X.data();
#pragma omp parallel for schedule(dynamic, 8) if (n >= kParallelMin)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = base + i * X.cols();
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = k(xi, base + j * X.cols(), d);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return GramMatrix(std::move(K), false);
}

Matrix gram_cross(const KernelParams& params, const DataMatrix& A, const DataMatrix& B) {
  if (A.cols() != B.cols()) throw std::invalid_argument("gram_cross: dimension mismatch");
  params.validate(static_cast<std::size_t>(A.cols()));
  const KernelEvaluator k(params);
  const auto d = static_cast<std::size_t>(A.cols());
  Matrix K(A.rows(), B.rows());
#pragma omp parallel for schedule(static) if (A.rows() >= kParallelMin)
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double* xi = A.data() + i * A.cols();
    for (Eigen::Index j = 0; j < B.rows(); ++j) K(i, j) = k(xi, B.data() + j * B.cols(), d);
  }
  return K;
}

Matrix center(const Matrix& K) {
  if (K.rows() != K.cols()) throw std::invalid_argument("center: matrix must be square");
  const Eigen::Index n = K.rows();
  if (n == 0) return K;
  const Vector row_mean = K.rowwise().mean();
  const Eigen::RowVectorXd col_mean = K.colwise().mean();
  const double grand = row_mean.mean();
  Matrix out(n, n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = K(i, j) - row_mean(i) - col_mean(j) + grand;
  }
  return out;
}

GramMatrix center(const GramMatrix& K) {
  return GramMatrix(center(K.entries()), true);
}

double frob_inner(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("frob_inner: shape mismatch");
  }
  const Eigen::Index cols = A.cols();
  // Per-column partials summed serially keep the result independent of the
  // thread count.
  std::vector<double> partial(static_cast<std::size_t>(cols), 0.0);
#pragma omp parallel for schedule(static) if (cols >= kParallelMin)
  for (Eigen::Index j = 0; j < cols; ++j) {
    partial[static_cast<std::size_t>(j)] = A.col(j).dot(B.col(j));
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

double frob_inner(const GramMatrix& A, const GramMatrix& B) {
  return frob_inner(A.entries(), B.entries());
}

double frob_norm(const Matrix& A) {
  return std::sqrt(frob_inner(A, A));
}

double frob_norm(const GramMatrix& A) {
  return frob_norm(A.entries());
}

GramMatrix combine(const std::vector<std::pair<double, GramMatrix>>& terms, Eigen::Index n) {
  if (terms.empty()) return GramMatrix::zeros(n);
  const bool centered = terms.front().second.centered();
  Matrix sum = Matrix::Zero(terms.front().second.size(), terms.front().second.size());
  for (const auto& [mu, K] : terms) {
    if (!(mu >= 0.0)) throw std::invalid_argument("combine: weights must be non-negative");
    if (K.size() != sum.rows()) throw std::invalid_argument("combine: shape mismatch");
    if (K.centered() != centered) throw std::invalid_argument("combine: mixed centered flags");
    sum.noalias() += mu * K.entries();
  }
  return GramMatrix(std::move(sum), centered);
}

double min_eigenvalue(const Matrix& K) {
  if (K.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(K, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& K, double rel_tol) {
  return min_eigenvalue(K) >= -rel_tol * frob_norm(K);
}

}  // namespace ckl
