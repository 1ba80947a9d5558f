#include "ckl/alignment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ckl/errors.hpp"

namespace ckl {

namespace {

void require_centered(const GramMatrix& K, const char* op) {
  if (!K.centered()) throw std::invalid_argument(std::string(op) + ": input must be centered");
#ifndef NDEBUG
  const double tol = 1e-8 * std::max(frob_norm(K), 1.0);
  if (K.entries().rowwise().sum().cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string(op) + ": centered flag set but row sums do not vanish");
  }
#endif
}

}  // namespace

TargetKernel ideal_kernel(const Labels& y) {
  if (y.size() < 2) throw std::invalid_argument("ideal_kernel: need at least two labels");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) throw std::invalid_argument("ideal_kernel: labels must be +1 or -1");
  }
  if ((y.array() == y(0)).all()) {
    throw DegenerateTargetError("ideal_kernel: all labels belong to one class");
  }
  TargetKernel t;
  t.raw = GramMatrix(y * y.transpose(), false);
  t.centered = center(t.raw);
  t.norm_c = frob_norm(t.centered);
  return t;
}

double centered_alignment(const GramMatrix& K, const GramMatrix& Kt) {
  if (K.size() != Kt.size()) throw std::invalid_argument("centered_alignment: shape mismatch");
  const Matrix a = K.centered() ? K.entries() : center(K.entries());
  const Matrix b = Kt.centered() ? Kt.entries() : center(Kt.entries());
  const double na = frob_norm(a);
  const double nb = frob_norm(b);
  if (na == 0.0 || nb == 0.0) throw DegenerateAlignmentError("centered_alignment: zero centered matrix");
  return std::clamp(frob_inner(a, b) / (na * nb), -1.0, 1.0);
}

double big_f(const Matrix& Kc, const TargetKernel& target) {
  const double nk = frob_norm(Kc);
  if (nk == 0.0) throw DegenerateAlignmentError("F: zero kernel matrix");
  return frob_inner(Kc, target.centered.entries()) / (nk * target.norm_c);
}

double big_f(const GramMatrix& K, const TargetKernel& target) {
  require_centered(K, "F");
  return big_f(K.entries(), target);
}

Matrix big_f_prime(const Matrix& Kc, const TargetKernel& target) {
  const double sq = frob_inner(Kc, Kc);
  if (sq == 0.0) throw DegenerateAlignmentError("F': zero kernel matrix");
  const double nk = std::sqrt(sq);
  const double a = frob_inner(Kc, target.centered.entries());
  return (target.centered.entries() - (a / sq) * Kc) / (nk * target.norm_c);
}

GramMatrix big_f_prime(const GramMatrix& K, const TargetKernel& target) {
  require_centered(K, "F'");
  return GramMatrix(big_f_prime(K.entries(), target), true);
}

StepProducts step_products(const Matrix& Kc, const Matrix& Kp, const TargetKernel& target) {
  const Matrix& t = target.centered.entries();
  return {frob_inner(Kc, t), frob_inner(Kp, t), frob_inner(Kc, Kc), frob_inner(Kc, Kp), frob_inner(Kp, Kp)};
}

double step_objective(const StepProducts& p, double eta) {
  const double denom = p.c + 2.0 * p.d * eta + p.e * eta * eta;
  if (!(denom > 0.0)) return -std::numeric_limits<double>::infinity();
  return (p.a + p.b * eta) / std::sqrt(denom);
}

double stationary_eta(const StepProducts& p) {
  const double denom = p.b * p.d - p.a * p.e;
  if (denom == 0.0) return 0.0;
  return std::max(0.0, (p.a * p.d - p.b * p.c) / denom);
}

double line_search_eta(const StepProducts& p, double eta_max) {
  if (!(eta_max > 0.0)) throw std::invalid_argument("line_search_eta: eta_max must be positive");
  const double eta_star = std::clamp(stationary_eta(p), 0.0, eta_max);
  // Ascending, so the first candidate within tolerance of the best is the
  // smallest.
  std::array<double, 3> candidates{0.0, eta_star, eta_max};
  std::array<double, 3> values{};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    values[i] = step_objective(p, candidates[i]);
    best = std::max(best, values[i]);
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] >= best - tol) return candidates[i];
  }
  return 0.0;
}

double line_search_eta(const GramMatrix& K, const GramMatrix& Kp, const TargetKernel& target, double eta_max) {
  require_centered(K, "line_search_eta");
  require_centered(Kp, "line_search_eta");
  if (frob_norm(K) == 0.0) throw DegenerateAlignmentError("line_search_eta: zero kernel matrix");
  return line_search_eta(step_products(K.entries(), Kp.entries(), target), eta_max);
}

}  // namespace ckl
