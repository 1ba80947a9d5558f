#pragma once

#include "ckl/kernels.hpp"

namespace ckl {

/// Labels are stored as doubles in {-1, +1}.
using Labels = Eigen::VectorXd;

/// The ideal kernel YY^T of a label vector and its centered version.
struct TargetKernel {
  GramMatrix raw;
  GramMatrix centered;
  double norm_c = 0.0;
};

/// Throws DegenerateTargetError when all labels are equal.
TargetKernel ideal_kernel(const Labels& y);

/// Empirical centered alignment <Kc, Ktc>_F / (|Kc|_F |Ktc|_F). Inputs whose
/// centered flag is unset are centered first.
double centered_alignment(const GramMatrix& K, const GramMatrix& Kt);

/// F(K) = <K, T_c>_F / (|K|_F |T_c|_F) for a centered K.
double big_f(const GramMatrix& K, const TargetKernel& target);

/// Matrix gradient of F at a centered K:
///   (T_c - |K|^-2 <K, T_c> K) / (|K| |T_c|)
GramMatrix big_f_prime(const GramMatrix& K, const TargetKernel& target);

// Unchecked variants used in inner loops; the caller guarantees Kc is centered.
double big_f(const Matrix& Kc, const TargetKernel& target);
Matrix big_f_prime(const Matrix& Kc, const TargetKernel& target);

/// Frobenius products entering the step-size line search, with K the
/// current centered matrix and K' the centered candidate direction.
struct StepProducts {
  double a = 0.0;  // <K, T_c>
  double b = 0.0;  // <K', T_c>
  double c = 0.0;  // <K, K>
  double d = 0.0;  // <K, K'>
  double e = 0.0;  // <K', K'>
};

StepProducts step_products(const Matrix& Kc, const Matrix& Kp, const TargetKernel& target);

/// (a + b eta) / sqrt(c + 2 d eta + e eta^2); equals F(K + eta K') * |T_c|.
double step_objective(const StepProducts& p, double eta);

/// Stationary point of the step objective, max(0, (ad - bc)/(bd - ae)), or 0
/// when bd - ae vanishes.
double stationary_eta(const StepProducts& p);

/// Best of {0, clamp(eta*), eta_max}; ties (within 1e-12 relative) go to the
/// smallest step.
double line_search_eta(const StepProducts& p, double eta_max);
double line_search_eta(const GramMatrix& K, const GramMatrix& Kp, const TargetKernel& target, double eta_max);

}  // namespace ckl
