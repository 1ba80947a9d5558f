#include <benchmark/benchmark.h>

#include "ckl/data.hpp"
#include "ckl/kernels.hpp"
#include "ckl/optimizer.hpp"
#include "ckl/reference.hpp"

namespace {

ckl::DataMatrix sample(Eigen::Index n, Eigen::Index d) {
  ckl::Rng rng(42);
  ckl::DataMatrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) X(i, k) = rng.normal();
  }
  return X;
}

ckl::Matrix direction(Eigen::Index n) {
  ckl::Rng rng(7);
  ckl::Matrix P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) P(i, j) = P(j, i) = rng.normal();
  }
  return ckl::center(P);
}

const ckl::KernelParams kGauss{ckl::KernelFamily::GaussianShared, {1.5}};

void BM_GramReference(benchmark::State& state) {
  const auto X = sample(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(ckl::reference::gram(kGauss, X));
}

void BM_GramParallel(benchmark::State& state) {
  const auto X = sample(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(ckl::gram(kGauss, X));
}

void BM_InnerObjectiveReference(benchmark::State& state) {
  const auto X = sample(state.range(0), 10);
  const auto P = direction(state.range(0));
  const std::vector<double> sigma{1.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ckl::reference::inner_objective(sigma, P, X, ckl::KernelFamily::GaussianShared));
  }
}

void BM_InnerObjectiveParallel(benchmark::State& state) {
  const auto X = sample(state.range(0), 10);
  const auto P = direction(state.range(0));
  const ckl::InnerObjective objective(P, X, ckl::KernelFamily::GaussianShared);
  const std::vector<double> sigma{1.5};
  for (auto _ : state) benchmark::DoNotOptimize(objective(sigma));
}

void BM_CenterReference(benchmark::State& state) {
  const auto P = direction(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ckl::reference::center(P));
}

void BM_CenterParallel(benchmark::State& state) {
  const auto P = direction(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ckl::center(P));
}

}  // namespace

BENCHMARK(BM_GramReference)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InnerObjectiveReference)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InnerObjectiveParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CenterReference)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CenterParallel)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
