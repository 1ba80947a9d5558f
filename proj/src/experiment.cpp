#include "ckl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ckl/alignment.hpp"
#include "ckl/errors.hpp"

namespace ckl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

std::string format_sigma(double s) {
  std::ostringstream out;
  out << std::setprecision(6) << s;
  return out.str();
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::CA1D: return "ca-1d";
    case Method::CAND: return "ca-nd";
    case Method::DU: return "du";
    case Method::DA: return "da";
    case Method::BestSingle: return "best-single";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::CA1D, Method::CAND, Method::DU, Method::DA, Method::BestSingle}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "' (expected ca-1d, ca-nd, du, da or best-single)");
}

std::vector<double> MethodSpec::default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -5; e <= 14; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

StageOne learn_kernel(const MethodSpec& spec, const Splits& splits, const KernelCombination* ca1d) {
  const Dataset& train = splits.train;
  const auto dim = static_cast<std::size_t>(train.dim());
  StageOne out;
  switch (spec.method) {
    case Method::CA1D: {
      auto fit = fit_ca(train.X, train.y, spec.learner);
      out.combination = std::move(fit.combination);
      out.trace = std::move(fit.trace);
      break;
    }
    case Method::CAND: {
      KernelCombination reference;
      if (ca1d != nullptr) {
        reference = *ca1d;
      } else {
        reference = fit_ca(train.X, train.y, spec.reference_learner).combination;
      }
      LearnerConfig config = spec.learner;
      if (!reference.empty()) {
        double start = reference.weighted_mean_sigma();
        const auto& box = config.space;
        start = std::clamp(start, box.lo.front(), box.hi.front());
        config.schedule = RestartSchedule::single(box.dim(), start);
      }
      std::vector<double> lambdas = spec.lambda_grid.empty() ? std::vector<double>{config.lambda} : spec.lambda_grid;
      if (splits.val.size() == 0) lambdas.resize(1);
      std::optional<TargetKernel> val_target;
      if (lambdas.size() > 1) val_target = ideal_kernel(splits.val.y);
      double best_alignment = -2.0;
      for (double lambda : lambdas) {
        config.lambda = lambda;
        auto fit = fit_ca(train.X, train.y, config);
        double score = 0.0;
        if (val_target) {
          if (fit.combination.empty()) {
            score = -2.0;
          } else {
            score = centered_alignment(evaluate_combination(fit.combination, splits.val.X), val_target->raw);
          }
        }
        if (!out.lambda || score > best_alignment) {
          best_alignment = score;
          out.lambda = lambda;
          out.combination = std::move(fit.combination);
          out.trace = std::move(fit.trace);
        }
      }
      break;
    }
    case Method::DU:
      spec.grid.validate(dim);
      out.combination = fit_uniform(spec.grid);
      break;
    case Method::DA:
      out.combination = fit_align_discrete(spec.grid, train.X, train.y, spec.discrete);
      break;
    case Method::BestSingle: {
      if (splits.val.size() == 0) throw std::invalid_argument("best-single needs a validation set");
      const KernelParams p = best_single(spec.grid, train.X, train.y, splits.val.X, splits.val.y);
      out.combination = KernelCombination{p.family, {{p.sigma, 1.0}}};
      break;
    }
  }
  return out;
}

RunResult run_method(const MethodSpec& spec, const Splits& splits, const StageTwoConfig& stage_two,
                     const KernelCombination* ca1d) {
  RunResult r;
  r.method_id = spec.id.empty() ? to_string(spec.method) : spec.id;
  const auto t0 = Clock::now();
  StageOne s1 = learn_kernel(spec, splits, ca1d);
  r.stage1_seconds = seconds_since(t0);
  r.combination = s1.combination.pruned();
  r.trace = std::move(s1.trace);
  r.lambda = s1.lambda;
  if (r.combination.empty()) {
    throw std::runtime_error(r.method_id + ": stage one produced an empty kernel combination");
  }

  const auto t1 = Clock::now();
  const Dataset& train = splits.train;
  const KernelCombination kernel = r.combination.normalized();
  const Matrix K = evaluate_combination(kernel, train.X).entries();
  SvmModel model;
  if (splits.val.size() > 0) {
    const Matrix Kv = evaluate_combination(kernel, train.X, splits.val.X);
    auto sel = holdout_select_c(K, train.y, Kv, splits.val.y, stage_two.c_grid, stage_two.svm);
    r.c = sel.c;
    r.validation_error_pct = sel.validation_error_pct;
    model = std::move(sel.model);
  } else {
    r.c = cv_select_c(K, train.y, stage_two.folds, stage_two.c_grid, stage_two.svm);
    model = train_svm(K, train.y, r.c, stage_two.svm);
  }
  const Matrix Kt = evaluate_combination(kernel, train.X, splits.test.X);
  r.test_error_pct = error_rate_pct(predict(model, Kt), splits.test.y);
  r.stage2_seconds = seconds_since(t1);

  r.train_alignment = centered_alignment(GramMatrix(K, false), ideal_kernel(train.y).raw);
  r.test_alignment =
      centered_alignment(evaluate_combination(r.combination, splits.test.X), ideal_kernel(splits.test.y).raw);
  return r;
}

std::vector<double> sine_frequencies() {
  return {std::sqrt(2.0), std::sqrt(12.0), std::sqrt(60.0)};
}

std::vector<MethodSpec> sine_methods() {
  const auto family = KernelFamily::Dirichlet1;
  std::vector<MethodSpec> out;
  MethodSpec ca;
  ca.id = "ca-1d";
  ca.method = Method::CA1D;
  ca.learner = LearnerConfig::defaults(family, 1);
  out.push_back(ca);

  const auto grid10 = KernelGrid::linear(family, 0.0, 9.0, 10);
  MethodSpec du;
  du.id = "du-grid10";
  du.method = Method::DU;
  du.grid = grid10;
  out.push_back(du);
  MethodSpec da = du;
  da.id = "da-grid10";
  da.method = Method::DA;
  out.push_back(da);

  const auto f = sine_frequencies();
  const std::vector<std::string> names{"sqrt2", "sqrt12", "sqrt60"};
  const auto fixed = [&](std::string id, std::vector<double> values) {
    MethodSpec m;
    m.id = std::move(id);
    m.method = Method::DU;
    m.grid = KernelGrid::from_values(family, values);
    out.push_back(m);
  };
  for (std::size_t i = 0; i < 3; ++i) fixed("single-" + names[i], {f[i]});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) fixed("pair-" + names[i] + "-" + names[j], {f[i], f[j]});
  }
  fixed("triple-uniform", f);
  return out;
}

std::vector<MethodSpec> gauss_methods(std::size_t dim) {
  std::vector<MethodSpec> out;
  MethodSpec ca;
  ca.id = "ca-1d";
  ca.method = Method::CA1D;
  ca.learner = LearnerConfig::defaults(KernelFamily::GaussianShared, dim);
  out.push_back(ca);

  MethodSpec nd;
  nd.id = "ca-nd";
  nd.method = Method::CAND;
  nd.learner = LearnerConfig::defaults(KernelFamily::GaussianPerDim, dim);
  nd.reference_learner = ca.learner;
  nd.lambda_grid = MethodSpec::default_lambda_grid();
  out.push_back(nd);

  const auto grid50 = KernelGrid::geometric(KernelFamily::GaussianShared, 1e-3, 1e3, 50);
  MethodSpec du;
  du.id = "du-grid50";
  du.method = Method::DU;
  du.grid = grid50;
  out.push_back(du);
  MethodSpec da = du;
  da.id = "da-grid50";
  da.method = Method::DA;
  out.push_back(da);
  return out;
}

namespace {

bool selected(const BenchOptions& options, const std::string& id) {
  if (options.only.empty()) return true;
  return std::find(options.only.begin(), options.only.end(), id) != options.only.end();
}

RepeatResult run_repeat(const Splits& splits, const std::vector<MethodSpec>& methods, const BenchOptions& options) {
  RepeatResult rr;
  std::optional<KernelCombination> ca1d;
  for (const auto& spec : methods) {
    if (!selected(options, spec.id)) continue;
    const KernelCombination* ref = spec.method == Method::CAND && ca1d ? &*ca1d : nullptr;
    RunResult r = run_method(spec, splits, options.stage_two, ref);
    if (spec.method == Method::CA1D && !ca1d) ca1d = r.combination;
    rr.runs.push_back(std::move(r));
  }
  return rr;
}

template <typename MakeSplits>
std::vector<RepeatResult> run_repeats(std::size_t count, const std::vector<MethodSpec>& methods,
                                      const BenchOptions& options, MakeSplits make) {
  std::vector<RepeatResult> out(count);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      auto [splits, seed, gamma] = make(i);
      out[i] = run_repeat(splits, methods, options);
      out[i].repeat = i % (count == 0 ? 1 : count);
      out[i].seed = seed;
      out[i].gamma = gamma;
      if (options.log != nullptr) {
        std::ostringstream line;
        line << "gamma=" << gamma << " seed=" << seed;
        for (const auto& r : out[i].runs) {
          line << ' ' << r.method_id << '=' << std::setprecision(4) << r.test_error_pct << '%';
        }
        line << '\n';
#pragma omp critical(ckl_bench_log)
        *options.log << line.str() << std::flush;
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

BenchResult bench_sine(std::size_t repeats, std::uint64_t seed0, const BenchOptions& options,
                       const std::vector<MethodSpec>& methods) {
  BenchResult result;
  result.experiment = "sine-mixture";
  result.repeats = run_repeats(repeats, methods, options, [&](std::size_t i) {
    const std::uint64_t seed = seed0 + i;
    return std::tuple{gen_sine_mixture(seed), seed, 0.0};
  });
  for (std::size_t i = 0; i < result.repeats.size(); ++i) result.repeats[i].repeat = i;
  return result;
}

BenchResult bench_gauss(const std::vector<double>& gammas, std::size_t repeats, std::uint64_t seed0,
                        const BenchOptions& options, const std::vector<MethodSpec>& methods) {
  BenchResult result;
  result.experiment = "gauss50";
  const std::size_t total = gammas.size() * repeats;
  result.repeats = run_repeats(total, methods, options, [&](std::size_t k) {
    const double gamma = gammas[k / repeats];
    const std::uint64_t seed = seed0 + k % repeats;
    return std::tuple{gen_gauss50(gamma, seed), seed, gamma};
  });
  for (std::size_t k = 0; k < result.repeats.size(); ++k) result.repeats[k].repeat = k % repeats;
  return result;
}

std::vector<AggregateRow> aggregate(const BenchResult& result) {
  struct Acc {
    std::vector<double> error, alignment, s1, s2;
  };
  std::vector<std::pair<double, std::string>> order;
  std::map<std::pair<double, std::string>, Acc> acc;
  for (const auto& rep : result.repeats) {
    for (const auto& r : rep.runs) {
      const auto key = std::pair{rep.gamma, r.method_id};
      if (!acc.contains(key)) order.push_back(key);
      auto& a = acc[key];
      a.error.push_back(r.test_error_pct);
      a.alignment.push_back(r.test_alignment);
      a.s1.push_back(r.stage1_seconds);
      a.s2.push_back(r.stage2_seconds);
    }
  }
  std::vector<AggregateRow> rows;
  for (const auto& key : order) {
    const auto& a = acc.at(key);
    AggregateRow row;
    row.gamma = key.first;
    row.method_id = key.second;
    row.count = a.error.size();
    row.error_mean = mean_of(a.error);
    row.error_stderr = stderr_of(a.error);
    row.alignment_mean = mean_of(a.alignment);
    row.alignment_stderr = stderr_of(a.alignment);
    row.stage1_mean = mean_of(a.s1);
    row.stage2_mean = mean_of(a.s2);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SurrogateGap> surrogate_gaps(const std::vector<AggregateRow>& rows) {
  std::vector<SurrogateGap> gaps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const auto& a = rows[i];
      const auto& b = rows[j];
      if (a.gamma != b.gamma || a.alignment_mean == b.alignment_mean) continue;
      const auto& hi = a.alignment_mean > b.alignment_mean ? a : b;
      const auto& lo = a.alignment_mean > b.alignment_mean ? b : a;
      if (hi.error_mean > lo.error_mean) {
        gaps.push_back({a.gamma, hi.method_id, lo.method_id, hi.alignment_mean, lo.alignment_mean, hi.error_mean,
                        lo.error_mean});
      }
    }
  }
  return gaps;
}

void write_runs_csv(std::ostream& out, const BenchResult& result) {
  out << "experiment,gamma,repeat,seed,method,test_error_pct,test_alignment,train_alignment,validation_error_pct,c,"
         "lambda,stage1_seconds,stage2_seconds,terms,sigmas\n";
  out << std::setprecision(10);
  for (const auto& rep : result.repeats) {
    for (const auto& r : rep.runs) {
      out << result.experiment << ',' << rep.gamma << ',' << rep.repeat << ',' << rep.seed << ',' << r.method_id
          << ',' << r.test_error_pct << ',' << r.test_alignment << ',' << r.train_alignment << ','
          << r.validation_error_pct << ',' << r.c << ',';
      if (r.lambda) out << *r.lambda;
      out << ',' << r.stage1_seconds << ',' << r.stage2_seconds << ',' << r.combination.terms.size() << ',';
      std::string sigmas;
      for (const auto& t : r.combination.terms) {
        if (t.sigma.size() != 1) continue;
        if (!sigmas.empty()) sigmas += ';';
        sigmas += format_sigma(t.sigma.front());
      }
      out << sigmas << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "gamma,method,count,test_error_mean,test_error_stderr,test_alignment_mean,test_alignment_stderr,"
         "stage1_seconds_mean,stage2_seconds_mean\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.gamma << ',' << r.method_id << ',' << r.count << ',' << r.error_mean << ',' << r.error_stderr << ','
        << r.alignment_mean << ',' << r.alignment_stderr << ',' << r.stage1_mean << ',' << r.stage2_mean << '\n';
  }
}

void write_surrogate_csv(std::ostream& out, const std::vector<SurrogateGap>& gaps) {
  out << "gamma,higher_alignment_method,lower_alignment_method,alignment_high,alignment_low,error_high,error_low\n";
  if (gaps.empty()) {
    out << "not observed\n";
    return;
  }
  out << std::setprecision(10);
  for (const auto& g : gaps) {
    out << g.gamma << ',' << g.higher_alignment << ',' << g.lower_alignment << ',' << g.alignment_high << ','
        << g.alignment_low << ',' << g.error_high << ',' << g.error_low << '\n';
  }
}

Matrix landscape_direction(const DataMatrix& X, const Labels& y, const KernelCombination& combination,
                           double epsilon) {
  const TargetKernel target = ideal_kernel(y);
  return center(big_f_prime(centered_state(X, combination, epsilon), target));
}

std::vector<LandscapePoint> landscape(const Matrix& P, const DataMatrix& X, KernelFamily family, double lo, double hi,
                                      std::size_t steps, bool log_spacing) {
  if (steps < 2) throw std::invalid_argument("landscape: need at least 2 steps");
  if (!(hi > lo)) throw std::invalid_argument("landscape: empty range");
  if (log_spacing && !(lo > 0.0)) throw std::invalid_argument("landscape: log spacing needs lo > 0");
  const InnerObjective objective(P, X, family);
  const std::size_t arity = family_arity(family, static_cast<std::size_t>(X.cols()));
  std::vector<LandscapePoint> out(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    double s = log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    if (i == steps - 1) s = hi;
    const std::vector<double> sigma(arity, s);
    out[i] = {s, -objective(sigma)};
  }
  return out;
}

}  // namespace ckl
