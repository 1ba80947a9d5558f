#pragma once

#include <span>

#include "ckl/kernels.hpp"
#include "ckl/optimizer.hpp"

/// Straight-line serial implementations of the parallel kernels. They share
/// no code with the optimized paths beyond `eval_kernel` and serve as the
/// oracle in tests and the baseline in the benchmark.
namespace ckl::reference {

Matrix gram(const KernelParams& params, const DataMatrix& X);
Matrix gram_cross(const KernelParams& params, const DataMatrix& A, const DataMatrix& B);

/// C_n K C_n by explicit matrix products.
Matrix center(const Matrix& K);

/// Double loop over all entries.
double frob_inner(const Matrix& A, const Matrix& B);

/// sum_ij P_ij k_sigma(x_i, x_j) - penalty, one kernel call per entry.
double inner_objective(std::span<const double> sigma, const Matrix& P, const DataMatrix& X, KernelFamily family,
                       Penalty penalty = {});

}  // namespace ckl::reference
