#include <cmath>

#include "ckl/alignment.hpp"
#include "ckl/data.hpp"
#include "ckl/errors.hpp"
#include "ckl/optimizer.hpp"
#include "ckl/reference.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ckl;

TEST_CASE("inner objective examples") {
  Rng rng(21);
  const auto X = oracle::random_points(rng, 8, 2);
  const Matrix zero = Matrix::Zero(8, 8);
  for (double s : {0.01, 1.0, 100.0}) {
    const std::vector<double> sigma{s};
    CHECK(inner_objective(sigma, zero, X, KernelFamily::GaussianShared) == 0.0);
  }
  const Penalty pen{3.5, true};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(pen(flat) == 0.0);
  const std::vector<double> spread{1.0, 2.0, 3.0};
  CHECK(pen(spread) == doctest::Approx(3.5 * 2.0));
  CHECK(Penalty{3.5, false}(spread) == 0.0);

  const Matrix P = oracle::random_symmetric(rng, 8);
  for (double s : {0.3, 1.0, 4.0}) {
    const std::vector<double> sigma{s};
    CHECK(inner_objective(sigma, P, X, KernelFamily::GaussianShared) ==
          doctest::Approx(reference::inner_objective(sigma, P, X, KernelFamily::GaussianShared)).epsilon(1e-12));
  }
}

TEST_CASE("inner objective matches the serial reference for every family") {
  Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(80));
    const Matrix P = oracle::random_symmetric(rng, n);
    const auto X1 = oracle::random_points(rng, n, 1, 3.0);
    const auto X3 = oracle::random_points(rng, n, 3);
    const std::vector<double> d{rng.uniform(0.0, 10.0)};
    const std::vector<double> g{std::exp(rng.uniform(-2.0, 2.0))};
    const std::vector<double> pd{0.5, 1.5, 3.0};
    const Penalty pen{rng.uniform(0.0, 2.0), true};
    CHECK(inner_objective(d, P, X1, KernelFamily::Dirichlet1) ==
          doctest::Approx(reference::inner_objective(d, P, X1, KernelFamily::Dirichlet1)).epsilon(1e-11));
    CHECK(inner_objective(g, P, X3, KernelFamily::GaussianShared) ==
          doctest::Approx(reference::inner_objective(g, P, X3, KernelFamily::GaussianShared)).epsilon(1e-11));
    CHECK(inner_objective(pd, P, X3, KernelFamily::GaussianPerDim, pen) ==
          doctest::Approx(reference::inner_objective(pd, P, X3, KernelFamily::GaussianPerDim, pen)).epsilon(1e-11));
  }
}

TEST_CASE("inner objective rejects points outside the box") {
  Rng rng(23);
  const auto X = oracle::random_points(rng, 5, 1);
  const Matrix P = oracle::random_symmetric(rng, 5);
  const auto box = SearchSpace::uniform(1, 0.0, 10.0, false);
  const std::vector<double> outside{11.0};
  CHECK_THROWS_AS(inner_objective(outside, P, X, KernelFamily::Dirichlet1, {}, box), std::invalid_argument);
  const std::vector<double> inside{3.0};
  CHECK_NOTHROW(inner_objective(inside, P, X, KernelFamily::Dirichlet1, {}, box));
  CHECK_THROWS_AS(InnerObjective(Matrix::Zero(4, 4), X, KernelFamily::Dirichlet1), std::invalid_argument);
}

TEST_CASE("search space and schedules") {
  const auto g = SearchSpace::defaults(KernelFamily::GaussianShared, 4);
  CHECK(g.dim() == 1);
  CHECK(g.log_scale);
  CHECK(g.lo[0] == 1e-3);
  CHECK(g.hi[0] == 1e5);
  const auto pd = SearchSpace::defaults(KernelFamily::GaussianPerDim, 4);
  CHECK(pd.dim() == 4);
  const auto d = SearchSpace::defaults(KernelFamily::Dirichlet1, 1);
  CHECK_FALSE(d.log_scale);
  CHECK_THROWS_AS(SearchSpace::uniform(1, 0.0, 1.0, false).validate(KernelFamily::GaussianShared), std::invalid_argument);
  CHECK_THROWS_AS(SearchSpace::uniform(1, 2.0, 1.0, false).validate(KernelFamily::Dirichlet1), std::invalid_argument);

  const auto geo = RestartSchedule::geometric(g);
  REQUIRE(geo.starts.size() == 9);
  CHECK(geo.starts.front()[0] == doctest::Approx(1e-3));
  CHECK(geo.starts.back()[0] == doctest::Approx(1e5));
  const auto narrow = RestartSchedule::geometric(SearchSpace::uniform(1, 2.0, 5.0, true));
  REQUIRE(narrow.starts.size() == 1);
  CHECK(narrow.starts[0][0] == doctest::Approx(std::sqrt(10.0)));

  const auto lin = RestartSchedule::linear(d, 0.05, 8);
  CHECK(lin.starts.size() == 201);
  CHECK(lin.starts.back()[0] == 10.0);
  CHECK(lin.refine_best == 8);
  CHECK_THROWS_AS(RestartSchedule::single(1, 20.0).validate(d), std::invalid_argument);
}

TEST_CASE("local_maximize examples") {
  const auto box = SearchSpace::uniform(1, 0.0, 10.0, false);
  SUBCASE("quadratic") {
    RestartSchedule s;
    s.starts = {{1.0}, {8.0}};
    const auto r = local_maximize([](std::span<const double> x) { return -(x[0] - 3.0) * (x[0] - 3.0); }, box, s);
    CHECK(std::abs(r.sigma[0] - 3.0) < 1e-4);
  }
  SUBCASE("constant objective returns the first start") {
    RestartSchedule s;
    s.starts = {{4.0}, {2.0}, {7.0}};
    const auto r = local_maximize([](std::span<const double>) { return 1.5; }, box, s);
    CHECK(r.sigma[0] == 4.0);
    CHECK(r.restart_index == 0);
  }
  SUBCASE("non-finite starts are skipped") {
    RestartSchedule s;
    s.starts = {{1.0}, {6.0}};
    const auto r = local_maximize(
        [](std::span<const double> x) { return x[0] < 2.0 ? std::nan("") : -(x[0] - 5.0) * (x[0] - 5.0); }, box, s);
    CHECK(r.restart_index == 1);
    CHECK(std::abs(r.sigma[0] - 5.0) < 1e-4);
  }
  SUBCASE("all starts non-finite") {
    RestartSchedule s;
    s.starts = {{1.0}, {6.0}};
    CHECK_THROWS_AS(local_maximize([](std::span<const double>) { return INFINITY * 0.0; }, box, s), OptimizerFailure);
  }
  SUBCASE("maximum on the boundary") {
    RestartSchedule s;
    s.starts = {{5.0}};
    const auto r = local_maximize([](std::span<const double> x) { return x[0]; }, box, s);
    CHECK(r.sigma[0] == doctest::Approx(10.0).epsilon(1e-9));
  }
  SUBCASE("log coordinates") {
    const auto lbox = SearchSpace::uniform(2, 1e-3, 1e5, true);
    RestartSchedule s = RestartSchedule::geometric(lbox);
    const auto r = local_maximize(
        [](std::span<const double> x) {
          const double a = std::log(x[0] / 0.2);
          const double b = std::log(x[1] / 30.0);
          return -(a * a + b * b);
        },
        lbox, s);
    CHECK(r.sigma[0] == doctest::Approx(0.2).epsilon(1e-4));
    CHECK(r.sigma[1] == doctest::Approx(30.0).epsilon(1e-4));
  }
}

TEST_CASE("local_maximize invariants on random multimodal objectives") {
  Rng rng(24);
  const auto box = SearchSpace::uniform(1, 0.0, 10.0, false);
  for (int t = 0; t < 40; ++t) {
    const double a = rng.uniform(0.5, 3.0);
    const double b = rng.uniform(0.0, 6.0);
    const double c = rng.uniform(-0.5, 0.5);
    const auto f = [=](std::span<const double> x) { return std::sin(a * x[0] + b) + c * x[0]; };
    RestartSchedule s;
    for (int k = 0; k < 4; ++k) s.starts.push_back({rng.uniform(0.0, 10.0)});
    const auto r = local_maximize(f, box, s);
    CHECK(box.contains(r.sigma));
    for (const auto& st : s.starts) CHECK(r.value >= f(st));
    const double delta = 1e-5 * 10.0;
    for (double off : {-delta, delta}) {
      const std::vector<double> nb{std::clamp(r.sigma[0] + off, 0.0, 10.0)};
      CHECK(r.value >= f(nb) - 1e-9);
    }
    // adding restarts never lowers the result
    RestartSchedule more = s;
    more.starts.push_back({rng.uniform(0.0, 10.0)});
    CHECK(local_maximize(f, box, more).value >= r.value);
    // determinism
    const auto again = local_maximize(f, box, s);
    CHECK(again.sigma == r.sigma);
    CHECK(again.value == r.value);
  }
}

TEST_CASE("first-iteration sine-mixture search beats a dense grid") {
  const auto splits = gen_sine_mixture(1);
  const auto& train = splits.train;
  const auto target = ideal_kernel(train.y);
  const Eigen::Index n = train.size();
  const Matrix K0 = center(Matrix(1e-10 * Matrix::Identity(n, n)));
  const Matrix P = center(big_f_prime(K0, target));
  const auto box = SearchSpace::defaults(KernelFamily::Dirichlet1, 1);
  const InnerObjective h(P, train.X, KernelFamily::Dirichlet1, {}, box);
  const auto r = local_maximize([&](std::span<const double> s) { return h(s); }, box,
                                RestartSchedule::defaults(KernelFamily::Dirichlet1, box));
  double grid_best = -INFINITY;
  for (int i = 0; i <= 1000; ++i) {
    const std::vector<double> s{std::min(10.0, 0.01 * i)};
    grid_best = std::max(grid_best, h(s));
  }
  CHECK(r.value >= grid_best - 1e-6);
}
