#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ckl/kernels.hpp"

namespace ckl {

/// Box over the kernel parameters. With log_scale the local search moves in
/// log(sigma) coordinates, which requires lo > 0.
struct SearchSpace {
  std::vector<double> lo;
  std::vector<double> hi;
  bool log_scale = false;

  [[nodiscard]] std::size_t dim() const noexcept { return lo.size(); }
  [[nodiscard]] bool contains(std::span<const double> sigma) const;
  void validate(KernelFamily family) const;

  /// Same [lo, hi] in every one of `dim` coordinates.
  static SearchSpace uniform(std::size_t dim, double lo, double hi, bool log_scale);
  /// Defaults per family: Gaussian bandwidths in [1e-3, 1e5] searched in log
  /// coordinates, Dirichlet frequencies in [0, 10] searched linearly.
  static SearchSpace defaults(KernelFamily family, std::size_t dim);
};

/// Start points for the multi-restart search.
///
/// When `refine_best` is non-zero every start is first evaluated once and
/// only the `refine_best` highest-valued starts that are local maxima among
/// their neighbours in schedule order are refined by the simplex search
/// (remaining slots are filled by the next best starts). Zero refines all.
struct RestartSchedule {
  std::vector<std::vector<double>> starts;
  std::size_t refine_best = 0;

  void validate(const SearchSpace& space) const;

  /// sigma in {1e-3, 1e-2, ..., 1e5} intersected with the box, as vectors of
  /// equal elements.
  static RestartSchedule geometric(const SearchSpace& space);
  /// Equally spaced scalar starts lo, lo+step, ..., hi (1-D boxes).
  static RestartSchedule linear(const SearchSpace& space, double step, std::size_t refine_best);
  /// A single start at the vector with every component equal to `value`.
  static RestartSchedule single(std::size_t dim, double value);
  /// Geometric for Gaussian families; a 0.05-spaced grid refined at its 8 best
  /// local maxima for Dirichlet frequencies, whose landscape has narrow peaks.
  static RestartSchedule defaults(KernelFamily family, const SearchSpace& space);
};

/// Shrinkage towards the common mean of the parameter vector:
/// lambda * |sigma - mean(sigma) 1|^2 is subtracted from the objective.
struct Penalty {
  double lambda = 0.0;
  bool enabled = false;

  [[nodiscard]] double operator()(std::span<const double> sigma) const;
};

/// <P, K(sigma)>_F - penalty(sigma), evaluated from cached pairwise geometry.
///
/// Evaluation is OpenMP-parallel over rows; row partials are summed serially
/// so the value does not depend on the thread count.
class InnerObjective {
 public:
  InnerObjective(const Matrix& P, const DataMatrix& X, KernelFamily family, Penalty penalty = {},
                 std::optional<SearchSpace> space = std::nullopt);

  /// Throws std::invalid_argument when sigma leaves the box (if one was
  /// given) or is outside the family's domain.
  double operator()(std::span<const double> sigma) const;
  /// Frobenius term only.
  [[nodiscard]] double alignment_term(std::span<const double> sigma) const;

  [[nodiscard]] KernelFamily family() const noexcept { return family_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

 private:
  KernelFamily family_;
  Penalty penalty_;
  std::optional<SearchSpace> space_;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  double trace_ = 0.0;
  // Upper-triangle pairs (i < j) in row order; row i starts at offsets_[i].
  std::vector<std::size_t> offsets_;
  std::vector<double> weight_;  // 2 P_ij
  std::vector<double> geom_;    // |xi-xj|^2 (Gaussian) or |xi-xj| (Dirichlet)
  DataMatrix X_;                // kept for the per-dimension family
};

/// One-shot evaluation of the inner objective.
double inner_objective(std::span<const double> sigma, const Matrix& P, const DataMatrix& X, KernelFamily family,
                       Penalty penalty = {}, std::optional<SearchSpace> space = std::nullopt);

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_edge = 0.05;     // fraction of the box width
  std::size_t evals_per_dim = 200;
  double rel_tol = 1e-6;          // simplex diameter / box width
  bool polish = true;             // compass search after the simplex stops
};

struct MaximizeResult {
  std::vector<double> sigma;
  double value = 0.0;
  std::size_t restart_index = 0;
  std::size_t evaluations = 0;
  double best_start_value = 0.0;  // max objective over all finite starts
};

using Objective = std::function<double(std::span<const double>)>;

/// Multi-restart bounded Nelder-Mead maximization. Starts whose objective is
/// non-finite are skipped; if all are, throws OptimizerFailure. Ties between
/// restarts go to the lower restart index.
MaximizeResult local_maximize(const Objective& objective, const SearchSpace& space, const RestartSchedule& schedule,
                              const NelderMeadOptions& options = {});

}  // namespace ckl
