#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ckl/baselines.hpp"
#include "ckl/data.hpp"
#include "ckl/fsam.hpp"
#include "ckl/svm.hpp"

namespace ckl {

enum class Method { CA1D, CAND, DU, DA, BestSingle };

std::string to_string(Method method);
/// Accepts ca-1d, ca-nd, du, da, best-single. Throws std::invalid_argument.
Method method_from_string(const std::string& name);

/// One learner with everything it needs besides the data.
struct MethodSpec {
  std::string id;  // label in reports, e.g. "du-grid10"
  Method method = Method::CA1D;
  LearnerConfig learner;              // CA methods; for ca-nd the per-dimension run
  LearnerConfig reference_learner;    // ca-nd: the shared-bandwidth run it starts from
  std::vector<double> lambda_grid;    // ca-nd: tuned by validation alignment
  KernelGrid grid;                    // DU, DA, best-single
  DiscreteAlignmentOptions discrete;

  /// 10^{-5, -4, ..., 14}.
  static std::vector<double> default_lambda_grid();
};

struct StageTwoConfig {
  std::vector<double> c_grid = default_c_grid();
  SvmOptions svm;
  int folds = 5;  // used only when there is no validation set
};

struct RunResult {
  std::string method_id;
  KernelCombination combination;
  std::optional<FitTrace> trace;
  std::optional<double> lambda;  // ca-nd
  double c = 0.0;
  double validation_error_pct = 0.0;
  double test_error_pct = 0.0;
  double train_alignment = 0.0;
  double test_alignment = 0.0;
  double stage1_seconds = 0.0;
  double stage2_seconds = 0.0;
};

/// Stage one (kernel learning) on `splits.train`, stage two (SVM with C
/// selected on `splits.val`, or by k-fold CV on train when val is empty),
/// then test error and test-set centered alignment of the learned kernel.
/// Stage two uses the combination with weights scaled to unit sum; the
/// reported combination keeps the learned weights.
///
/// For ca-nd a finished ca-1d result on the same data can be passed to avoid
/// refitting it.
RunResult run_method(const MethodSpec& spec, const Splits& splits, const StageTwoConfig& stage_two,
                     const KernelCombination* ca1d = nullptr);

/// Stage one only.
struct StageOne {
  KernelCombination combination;
  std::optional<FitTrace> trace;
  std::optional<double> lambda;
};
StageOne learn_kernel(const MethodSpec& spec, const Splits& splits, const KernelCombination* ca1d = nullptr);

/// Dirichlet frequencies of the sine mixture: sqrt 2, sqrt 12, sqrt 60.
std::vector<double> sine_frequencies();

/// Methods of the sine-mixture benchmark: ca-1d, du-grid10, da-grid10, the
/// three single frequencies, the three pairs and the uniform triple.
std::vector<MethodSpec> sine_methods();
/// Methods of the 50-d benchmark: ca-1d, ca-nd, du-grid50, da-grid50, the
/// grid being 1e-3 g^{0..49} from 1e-3 to 1e3.
std::vector<MethodSpec> gauss_methods(std::size_t dim = 50);

struct RepeatResult {
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;  // 0 for the sine benchmark
  std::vector<RunResult> runs;
};

struct BenchOptions {
  StageTwoConfig stage_two;
  std::vector<std::string> only;  // method ids to run; empty runs all
  std::ostream* log = nullptr;    // one line per finished run
};

struct BenchResult {
  std::string experiment;
  std::vector<RepeatResult> repeats;
};

/// Repeat i uses seed seed0 + i; repeats run in parallel, results are in
/// repeat order.
BenchResult bench_sine(std::size_t repeats, std::uint64_t seed0, const BenchOptions& options = {},
                       const std::vector<MethodSpec>& methods = sine_methods());
BenchResult bench_gauss(const std::vector<double>& gammas, std::size_t repeats, std::uint64_t seed0,
                        const BenchOptions& options = {}, const std::vector<MethodSpec>& methods = gauss_methods());

struct AggregateRow {
  double gamma = 0.0;
  std::string method_id;
  std::size_t count = 0;
  double error_mean = 0.0;
  double error_stderr = 0.0;
  double alignment_mean = 0.0;
  double alignment_stderr = 0.0;
  double stage1_mean = 0.0;
  double stage2_mean = 0.0;
};

/// Mean and standard error per (gamma, method), in first-seen order.
std::vector<AggregateRow> aggregate(const BenchResult& result);

/// A pair of methods at one gamma whose mean alignment ordering disagrees
/// with their mean error ordering (higher alignment but higher error).
struct SurrogateGap {
  double gamma = 0.0;
  std::string higher_alignment;
  std::string lower_alignment;
  double alignment_high = 0.0;
  double alignment_low = 0.0;
  double error_high = 0.0;
  double error_low = 0.0;
};
std::vector<SurrogateGap> surrogate_gaps(const std::vector<AggregateRow>& rows);

void write_runs_csv(std::ostream& out, const BenchResult& result);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
/// One row per gap, or a single "not observed" line.
void write_surrogate_csv(std::ostream& out, const std::vector<SurrogateGap>& gaps);

/// Flipped inner objective h(sigma) = -<P, K(sigma)>_F on a 1-D sweep of
/// equal-component parameter vectors, `steps` points from lo to hi.
struct LandscapePoint {
  double sigma = 0.0;
  double h = 0.0;
};
std::vector<LandscapePoint> landscape(const Matrix& P, const DataMatrix& X, KernelFamily family, double lo, double hi,
                                      std::size_t steps, bool log_spacing);
/// P = C F'(K_c) C for the state epsilon I + combination on (X, y).
Matrix landscape_direction(const DataMatrix& X, const Labels& y, const KernelCombination& combination,
                           double epsilon);

}  // namespace ckl
