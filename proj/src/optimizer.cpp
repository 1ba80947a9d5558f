#include "ckl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ckl/errors.hpp"

namespace ckl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

bool SearchSpace::contains(std::span<const double> sigma) const {
  if (sigma.size() != lo.size()) return false;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (!(sigma[k] >= lo[k] && sigma[k] <= hi[k])) return false;
  }
  return true;
}

void SearchSpace::validate(KernelFamily family) const {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("search space: bad bounds");
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] < hi[k])) throw std::invalid_argument("search space: lo must be below hi");
    if (family == KernelFamily::Dirichlet1 ? lo[k] < 0.0 : lo[k] <= 0.0) {
      throw std::invalid_argument("search space: lower bound outside the family's domain");
    }
    if (log_scale && lo[k] <= 0.0) throw std::invalid_argument("search space: log scale needs lo > 0");
  }
}

SearchSpace SearchSpace::uniform(std::size_t dim, double lo, double hi, bool log_scale) {
  return {std::vector<double>(dim, lo), std::vector<double>(dim, hi), log_scale};
}

SearchSpace SearchSpace::defaults(KernelFamily family, std::size_t dim) {
  const std::size_t arity = family_arity(family, dim);
  if (family == KernelFamily::Dirichlet1) return uniform(arity, 0.0, 10.0, false);
  return uniform(arity, 1e-3, 1e5, true);
}

void RestartSchedule::validate(const SearchSpace& space) const {
  if (starts.empty()) throw std::invalid_argument("restart schedule: no start points");
  for (const auto& s : starts) {
    if (!space.contains(s)) throw std::invalid_argument("restart schedule: start point outside the box");
  }
}

RestartSchedule RestartSchedule::geometric(const SearchSpace& space) {
  RestartSchedule schedule;
  for (int e = -3; e <= 5; ++e) {
    const std::vector<double> s(space.dim(), std::pow(10.0, e));
    if (space.contains(s)) schedule.starts.push_back(s);
  }
  if (schedule.starts.empty()) {
    // Box misses every decade: fall back to the box midpoint.
    std::vector<double> mid(space.dim());
    for (std::size_t k = 0; k < mid.size(); ++k) {
      mid[k] = space.log_scale ? std::sqrt(space.lo[k] * space.hi[k]) : 0.5 * (space.lo[k] + space.hi[k]);
    }
    schedule.starts.push_back(mid);
  }
  return schedule;
}

RestartSchedule RestartSchedule::linear(const SearchSpace& space, double step, std::size_t refine_best) {
  if (space.dim() != 1) throw std::invalid_argument("linear restart schedule needs a 1-D box");
  if (!(step > 0.0)) throw std::invalid_argument("linear restart schedule: step must be positive");
  RestartSchedule schedule;
  schedule.refine_best = refine_best;
  const double lo = space.lo[0];
  const double hi = space.hi[0];
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) schedule.starts.push_back({std::min(hi, lo + step * static_cast<double>(i))});
  if (schedule.starts.back()[0] < hi) schedule.starts.push_back({hi});
  return schedule;
}

RestartSchedule RestartSchedule::single(std::size_t dim, double value) {
  RestartSchedule schedule;
  schedule.starts.push_back(std::vector<double>(dim, value));
  return schedule;
}

RestartSchedule RestartSchedule::defaults(KernelFamily family, const SearchSpace& space) {
  if (family == KernelFamily::Dirichlet1 && space.dim() == 1) return linear(space, 0.05, 8);
  return geometric(space);
}

double Penalty::operator()(std::span<const double> sigma) const {
  if (!enabled || lambda == 0.0 || sigma.empty()) return 0.0;
  const double mean = std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(sigma.size());
  double s = 0.0;
  for (double v : sigma) s += (v - mean) * (v - mean);
  return lambda * s;
}

InnerObjective::InnerObjective(const Matrix& P, const DataMatrix& X, KernelFamily family, Penalty penalty,
                               std::optional<SearchSpace> space)
    : family_(family), penalty_(penalty), space_(std::move(space)) {
  if (P.rows() != P.cols() || P.rows() != X.rows()) {
    throw std::invalid_argument("inner objective: P must be n x n for n samples");
  }
  n_ = static_cast<std::size_t>(X.rows());
  dim_ = family_arity(family, static_cast<std::size_t>(X.cols()));
  if (space_) {
    space_->validate(family);
    if (space_->dim() != dim_) throw std::invalid_argument("inner objective: box dimension mismatch");
  }
  trace_ = P.trace();
  offsets_.resize(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + (n_ - 1 - i);
  const std::size_t pairs = offsets_[n_];
  weight_.resize(pairs);
  if (family == KernelFamily::GaussianPerDim) {
    X_ = X;
  } else {
    geom_.resize(pairs);
  }
  const auto n = static_cast<Eigen::Index>(n_);
#pragma omp parallel for schedule(dynamic, 16) if (n_ >= 64)
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t p = offsets_[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
      weight_[p] = P(i, j) + P(j, i);
      if (family != KernelFamily::GaussianPerDim) {
        const double sq = (X.row(i) - X.row(j)).squaredNorm();
        geom_[p] = family == KernelFamily::Dirichlet1 ? std::sqrt(sq) : sq;
      }
    }
  }
}

double InnerObjective::alignment_term(std::span<const double> sigma) const {
  if (sigma.size() != dim_) throw std::invalid_argument("inner objective: wrong parameter length");
  if (space_ && !space_->contains(sigma)) throw std::invalid_argument("inner objective: sigma outside the box");
  KernelParams{family_, {sigma.begin(), sigma.end()}}.validate_values();

  const double diag = family_ == KernelFamily::Dirichlet1 ? 3.0 : 1.0;
  std::vector<double> partial(n_, 0.0);
  const auto n = static_cast<Eigen::Index>(n_);
  switch (family_) {
    case KernelFamily::GaussianShared: {
      const double inv = 1.0 / (sigma[0] * sigma[0]);
#pragma omp parallel for schedule(dynamic, 16) if (n_ >= 64)
      for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) s += weight_[p] * std::exp(-geom_[p] * inv);
        partial[static_cast<std::size_t>(i)] = s;
      }
      break;
    }
    case KernelFamily::Dirichlet1: {
      const double w = sigma[0];
#pragma omp parallel for schedule(dynamic, 16) if (n_ >= 64)
      for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
          s += weight_[p] * (1.0 + 2.0 * std::cos(w * geom_[p]));
        }
        partial[static_cast<std::size_t>(i)] = s;
      }
      break;
    }
    case KernelFamily::GaussianPerDim: {
      std::vector<double> inv(dim_);
      for (std::size_t k = 0; k < dim_; ++k) inv[k] = 1.0 / (sigma[k] * sigma[k]);
      const auto d = static_cast<std::size_t>(X_.cols());
#pragma omp parallel for schedule(dynamic, 16) if (n_ >= 64)
      for (Eigen::Index i = 0; i < n; ++i) {
        const double* xi = X_.data() + i * X_.cols();
        double s = 0.0;
        std::size_t p = offsets_[i];
        for (Eigen::Index j = i + 1; j < n; ++j, ++p) {
          const double* xj = X_.data() + j * X_.cols();
          double e = 0.0;
          for (std::size_t k = 0; k < d; ++k) {
            const double diff = xi[k] - xj[k];
            e += diff * diff * inv[k];
          }
          s += weight_[p] * std::exp(-e);
        }
        partial[static_cast<std::size_t>(i)] = s;
      }
      break;
    }
  }
  return std::accumulate(partial.begin(), partial.end(), diag * trace_);
}

double InnerObjective::operator()(std::span<const double> sigma) const {
  return alignment_term(sigma) - penalty_(sigma);
}

double inner_objective(std::span<const double> sigma, const Matrix& P, const DataMatrix& X, KernelFamily family,
                       Penalty penalty, std::optional<SearchSpace> space) {
  return InnerObjective(P, X, family, penalty, std::move(space))(sigma);
}

namespace {

// Bounded Nelder-Mead in search coordinates (log or linear).
class SimplexSearch {
 public:
  SimplexSearch(const Objective& objective, const SearchSpace& space, const NelderMeadOptions& options)
      : objective_(objective), space_(space), options_(options), dim_(space.dim()) {
    lo_.resize(dim_);
    hi_.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      lo_[k] = to_search(space.lo[k]);
      hi_[k] = to_search(space.hi[k]);
    }
  }

  std::vector<double> to_search(std::span<const double> sigma) const {
    std::vector<double> u(sigma.begin(), sigma.end());
    for (double& v : u) v = to_search(v);
    return u;
  }

  std::vector<double> to_sigma(const std::vector<double>& u) const {
    std::vector<double> s(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      s[k] = space_.log_scale ? std::exp(u[k]) : u[k];
      // exp(log(x)) may land an ulp outside the box.
      s[k] = std::clamp(s[k], space_.lo[k], space_.hi[k]);
    }
    return s;
  }

  double eval(std::vector<double>& u) {
    for (std::size_t k = 0; k < dim_; ++k) u[k] = std::clamp(u[k], lo_[k], hi_[k]);
    ++evaluations_;
    const double v = objective_(to_sigma(u));
    return std::isfinite(v) ? v : kNegInf;
  }

  struct Vertex {
    std::vector<double> u;
    double f;
  };

  Vertex run(std::span<const double> start, double start_value) {
    const std::size_t budget = options_.evals_per_dim * dim_;
    std::vector<Vertex> simplex;
    simplex.push_back({to_search(start), start_value});
    for (std::size_t k = 0; k < dim_; ++k) {
      std::vector<double> u = simplex[0].u;
      const double h = options_.initial_edge * (hi_[k] - lo_[k]);
      u[k] = u[k] + h <= hi_[k] ? u[k] + h : u[k] - h;
      const double f = eval(u);
      simplex.push_back({std::move(u), f});
    }
    const auto order = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
    while (true) {
      std::stable_sort(simplex.begin(), simplex.end(), order);
      if (converged(simplex) || evaluations_ >= budget) break;

      std::vector<double> centroid(dim_, 0.0);
      for (std::size_t v = 0; v < dim_; ++v) {
        for (std::size_t k = 0; k < dim_; ++k) centroid[k] += simplex[v].u[k];
      }
      for (double& c : centroid) c /= static_cast<double>(dim_);
      Vertex& worst = simplex.back();
      const auto along = [&](const std::vector<double>& from, double t) {
        std::vector<double> u(dim_);
        for (std::size_t k = 0; k < dim_; ++k) u[k] = centroid[k] + t * (from[k] - centroid[k]);
        return u;
      };

      auto xr = along(worst.u, -options_.reflection);
      const double fr = eval(xr);
      if (fr > simplex.front().f) {
        auto xe = along(xr, options_.expansion);
        const double fe = eval(xe);
        if (fe > fr) {
          worst = {std::move(xe), fe};
        } else {
          worst = {std::move(xr), fr};
        }
        continue;
      }
      if (fr > simplex[dim_ - 1].f) {
        worst = {std::move(xr), fr};
        continue;
      }
      if (fr > worst.f) {
        auto xc = along(xr, options_.contraction);
        const double fc = eval(xc);
        if (fc >= fr) {
          worst = {std::move(xc), fc};
          continue;
        }
      } else {
        auto xc = along(worst.u, options_.contraction);
        const double fc = eval(xc);
        if (fc > worst.f) {
          worst = {std::move(xc), fc};
          continue;
        }
      }
      for (std::size_t v = 1; v < simplex.size(); ++v) {
        for (std::size_t k = 0; k < dim_; ++k) {
          simplex[v].u[k] = simplex[0].u[k] + options_.shrink * (simplex[v].u[k] - simplex[0].u[k]);
        }
        simplex[v].f = eval(simplex[v].u);
      }
    }
    Vertex best = simplex.front();
    if (options_.polish) polish(best, simplex);
    return best;
  }

  [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  double to_search(double sigma) const { return space_.log_scale ? std::log(sigma) : sigma; }

  bool converged(const std::vector<Vertex>& simplex) const {
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (std::size_t k = 0; k < dim_; ++k) {
        if (std::abs(simplex[v].u[k] - simplex[0].u[k]) >= options_.rel_tol * (hi_[k] - lo_[k])) return false;
      }
    }
    return true;
  }

  // Compass search from the simplex optimum: the first improving coordinate
  // step is taken and that step doubles, steps halve when a sweep finds
  // nothing. A simplex flattened against the box can stop far from the
  // optimum along the face, hence the doubling.
  void polish(Vertex& best, const std::vector<Vertex>& simplex) {
    const std::size_t budget = evaluations_ + 20 * dim_ + 40;
    std::vector<double> step(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      double spread = 0.0;
      for (const auto& v : simplex) spread = std::max(spread, std::abs(v.u[k] - best.u[k]));
      step[k] = std::max(spread, 1e-5 * (hi_[k] - lo_[k]));
    }
    while (evaluations_ < budget) {
      bool improved = false;
      for (std::size_t k = 0; k < dim_ && !improved && evaluations_ < budget; ++k) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> u = best.u;
          u[k] += sign * step[k];
          const double f = eval(u);
          if (f > best.f) {
            best = {std::move(u), f};
            step[k] = std::min(2.0 * step[k], hi_[k] - lo_[k]);
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        bool done = true;
        for (std::size_t k = 0; k < dim_; ++k) {
          step[k] *= 0.5;
          if (step[k] >= 1e-7 * (hi_[k] - lo_[k])) done = false;
        }
        if (done) break;
      }
    }
  }

  const Objective& objective_;
  const SearchSpace& space_;
  const NelderMeadOptions& options_;
  std::size_t dim_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::size_t evaluations_ = 0;
};

std::vector<std::size_t> refine_set(const std::vector<double>& values, std::size_t refine_best) {
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) finite.push_back(i);
  }
  if (refine_best == 0 || refine_best >= finite.size()) return finite;

  const auto by_value = [&](std::size_t a, std::size_t b) {
    return values[a] != values[b] ? values[a] > values[b] : a < b;
  };
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> rest;
  for (std::size_t i : finite) {
    const bool left = i == 0 || !(values[i - 1] > values[i]);
    const bool right = i + 1 == values.size() || !(values[i + 1] > values[i]);
    (left && right ? peaks : rest).push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), by_value);
  std::sort(rest.begin(), rest.end(), by_value);
  std::vector<std::size_t> chosen(peaks.begin(), peaks.begin() + std::min(refine_best, peaks.size()));
  for (std::size_t i = 0; chosen.size() < refine_best && i < rest.size(); ++i) chosen.push_back(rest[i]);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

MaximizeResult local_maximize(const Objective& objective, const SearchSpace& space, const RestartSchedule& schedule,
                              const NelderMeadOptions& options) {
  if (space.lo.empty() || space.lo.size() != space.hi.size()) throw std::invalid_argument("local_maximize: bad box");
  for (std::size_t k = 0; k < space.dim(); ++k) {
    if (!(space.lo[k] < space.hi[k])) throw std::invalid_argument("local_maximize: lo must be below hi");
    if (space.log_scale && !(space.lo[k] > 0.0)) throw std::invalid_argument("local_maximize: log scale needs lo > 0");
  }
  schedule.validate(space);

  const std::size_t count = schedule.starts.size();
  std::vector<double> start_values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = objective(schedule.starts[i]);
    start_values[i] = std::isfinite(v) ? v : kNegInf;
  }
  const std::vector<std::size_t> refine = refine_set(start_values, schedule.refine_best);
  if (refine.empty()) throw OptimizerFailure("local_maximize: objective is non-finite at every start point");

  struct Outcome {
    std::vector<double> sigma;
    double value = kNegInf;
    std::size_t evaluations = 0;
    std::exception_ptr error;
  };
  std::vector<Outcome> outcomes(refine.size());
  const auto jobs = static_cast<long>(refine.size());
#pragma omp parallel for schedule(dynamic) if (jobs > 1)
  for (long r = 0; r < jobs; ++r) {
    auto& out = outcomes[static_cast<std::size_t>(r)];
    try {
      const std::size_t idx = refine[static_cast<std::size_t>(r)];
      SimplexSearch search(objective, space, options);
      const auto best = search.run(schedule.starts[idx], start_values[idx]);
      out.sigma = search.to_sigma(best.u);
      out.value = best.f;
      // Keep the exact start when the simplex never left it.
      if (!(best.f > start_values[idx])) {
        out.sigma = schedule.starts[idx];
        out.value = start_values[idx];
      }
      out.evaluations = search.evaluations();
    } catch (...) {
      out.error = std::current_exception();
    }
  }

  MaximizeResult result;
  result.best_start_value = *std::max_element(start_values.begin(), start_values.end());
  result.evaluations = count;
  bool have = false;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (outcomes[r].error) std::rethrow_exception(outcomes[r].error);
    result.evaluations += outcomes[r].evaluations;
    if (!have || outcomes[r].value > result.value) {
      result.sigma = outcomes[r].sigma;
      result.value = outcomes[r].value;
      result.restart_index = refine[r];
      have = true;
    }
  }
  return result;
}

}  // namespace ckl
