#include <cmath>

#include "ckl/kernels.hpp"
#include "ckl/reference.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ckl;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

}  // namespace

TEST_CASE("eval_kernel formulas") {
  const auto x = v({0.3, -1.2});
  CHECK(eval_kernel({KernelFamily::GaussianShared, {2.0}}, x, x) == doctest::Approx(1.0));
  CHECK(eval_kernel({KernelFamily::Dirichlet1, {5.0}}, x, x) == doctest::Approx(3.0));
  const auto a = v({0.0});
  const auto b = v({1.0});
  CHECK(eval_kernel({KernelFamily::GaussianShared, {1.0}}, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // sigma^2 in the denominator, not 2 sigma^2
  CHECK(eval_kernel({KernelFamily::GaussianShared, {2.0}}, a, b) == doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  CHECK(eval_kernel({KernelFamily::Dirichlet1, {2.0}}, a, b) == doctest::Approx(1.0 + 2.0 * std::cos(2.0)));
  const auto p = v({0.0, 0.0});
  const auto q = v({1.0, 2.0});
  CHECK(eval_kernel({KernelFamily::GaussianPerDim, {1.0, 4.0}}, p, q) ==
        doctest::Approx(std::exp(-(1.0 + 4.0 / 16.0))).epsilon(1e-14));
}

TEST_CASE("eval_kernel errors") {
  const auto a = v({0.0});
  const auto b = v({1.0, 2.0});
  CHECK_THROWS_AS(eval_kernel({KernelFamily::GaussianShared, {1.0}}, a, b), std::invalid_argument);
  CHECK_THROWS_AS(eval_kernel({KernelFamily::GaussianShared, {0.0}}, a, a), std::invalid_argument);
  CHECK_THROWS_AS(eval_kernel({KernelFamily::GaussianShared, {-1.0}}, a, a), std::invalid_argument);
  CHECK_THROWS_AS(eval_kernel({KernelFamily::Dirichlet1, {-0.5}}, a, a), std::invalid_argument);
  CHECK_NOTHROW(eval_kernel({KernelFamily::Dirichlet1, {0.0}}, a, a));
  CHECK_THROWS_AS(KernelParams({KernelFamily::GaussianPerDim, {1.0}}).validate(2), std::invalid_argument);
  CHECK_NOTHROW(KernelParams({KernelFamily::GaussianPerDim, {1.0, 2.0}}).validate(2));
}

TEST_CASE("kernel value ranges") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto X = oracle::random_points(rng, 2, 3, 3.0);
    const double s = rng.uniform(0.01, 10.0);
    const double g = eval_kernel({KernelFamily::GaussianShared, {s}}, row_span(X, 0), row_span(X, 1));
    CHECK(g >= 0.0);  // exp underflows for distant points
    CHECK(g <= 1.0);
    const double d = eval_kernel({KernelFamily::Dirichlet1, {s}}, row_span(X, 0), row_span(X, 1));
    CHECK(d >= -1.0);
    CHECK(d <= 3.0);
  }
}

TEST_CASE("family names round trip") {
  for (auto f : {KernelFamily::GaussianShared, KernelFamily::GaussianPerDim, KernelFamily::Dirichlet1}) {
    CHECK(family_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(family_from_string("laplace"), std::invalid_argument);
  CHECK(family_arity(KernelFamily::GaussianPerDim, 7) == 7);
  CHECK(family_arity(KernelFamily::Dirichlet1, 7) == 1);
}

TEST_CASE("gram") {
  Rng rng(5);
  SUBCASE("single point") {
    const auto X = oracle::random_points(rng, 1, 3);
    const auto K = gram({KernelFamily::Dirichlet1, {2.5}}, X);
    REQUIRE(K.size() == 1);
    CHECK(K(0, 0) == doctest::Approx(3.0));
    CHECK_FALSE(K.centered());
  }
  SUBCASE("huge bandwidth gives all ones") {
    const auto X = oracle::random_points(rng, 6, 2);
    const auto K = gram({KernelFamily::GaussianShared, {1e6}}, X);
    CHECK((K.entries().array() - 1.0).abs().maxCoeff() <= 1e-9);
  }
  SUBCASE("zero frequency gives all threes") {
    const auto X = oracle::random_points(rng, 6, 1);
    const auto K = gram({KernelFamily::Dirichlet1, {0.0}}, X);
    CHECK((K.entries().array() - 3.0).abs().maxCoeff() == 0.0);
  }
  SUBCASE("matches the serial reference") {
    for (auto params : {KernelParams{KernelFamily::GaussianShared, {0.7}}, KernelParams{KernelFamily::Dirichlet1, {3.1}},
                        KernelParams{KernelFamily::GaussianPerDim, {0.5, 1.0, 2.0}}}) {
      const auto X = oracle::random_points(rng, 90, params.family == KernelFamily::Dirichlet1 ? 1 : 3);
      const Matrix ref = reference::gram(params, X);
      CHECK((gram(params, X).entries() - ref).cwiseAbs().maxCoeff() <= 1e-14);
      const auto A = oracle::random_points(rng, 70, X.cols());
      CHECK((gram_cross(params, A, X) - reference::gram_cross(params, A, X)).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("center examples") {
  const Matrix ones = Matrix::Ones(4, 4);
  CHECK(center(ones).cwiseAbs().maxCoeff() <= 1e-15);
  const GramMatrix I2(Matrix::Identity(2, 2));
  const GramMatrix C = center(I2);
  CHECK(C.centered());
  CHECK(C(0, 0) == doctest::Approx(0.5));
  CHECK(C(0, 1) == doctest::Approx(-0.5));
  CHECK(C(1, 0) == doctest::Approx(-0.5));
  CHECK(C(1, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(GramMatrix(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("center matches explicit C K C") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(30));
    const Matrix K = oracle::random_symmetric(rng, n);
    const Matrix ref = reference::center(K);
    CHECK((center(K) - ref).norm() <= 1e-12 * (1.0 + K.norm()));
    const double c = rng.normal() * 10.0;
    CHECK((center(Matrix(K + c * Matrix::Ones(n, n))) - center(K)).norm() <= 1e-10 * (1.0 + K.norm()));
  }
}

TEST_CASE("frobenius products") {
  CHECK(frob_inner(Matrix::Identity(3, 3), Matrix::Identity(3, 3)) == doctest::Approx(3.0));
  CHECK(frob_norm(Matrix::Zero(4, 4)) == 0.0);
  CHECK_THROWS_AS(frob_inner(Matrix::Zero(2, 2), Matrix::Zero(3, 3)), std::invalid_argument);
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const Matrix A = oracle::random_symmetric(rng, 5);
    const Matrix B = oracle::random_symmetric(rng, 5);
    CHECK(frob_inner(A, B) == frob_inner(B, A));
    CHECK(frob_inner(A, B) == doctest::Approx(reference::frob_inner(A, B)).epsilon(1e-12));
    CHECK(frob_norm(A) >= 0.0);
  }
}

TEST_CASE("combine") {
  const GramMatrix Z = combine({}, 3);
  CHECK(Z.size() == 3);
  CHECK(Z.entries().isZero(0.0));
  const GramMatrix I(Matrix::Identity(2, 2));
  CHECK(combine({{1.0, I}}, 2).entries() == I.entries());
  CHECK(combine({{2.0, I}, {3.0, I}}, 2).entries().isApprox(5.0 * Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(combine({{-1.0, I}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(combine({{1.0, I}, {1.0, center(I)}}, 2), std::invalid_argument);
  CHECK(combine({{1.0, center(I)}}, 2).centered());
}

TEST_CASE("gram output is symmetric and PSD") {
  Rng rng(10);
  for (int t = 0; t < 60; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(49));
    const KernelFamily fam = t % 3 == 0 ? KernelFamily::Dirichlet1 : t % 3 == 1 ? KernelFamily::GaussianShared
                                                                                 : KernelFamily::GaussianPerDim;
    const Eigen::Index d = fam == KernelFamily::Dirichlet1 ? 1 : 3;
    const auto X = oracle::random_points(rng, n, d, 2.0);
    std::vector<double> sigma(family_arity(fam, static_cast<std::size_t>(d)));
    for (auto& s : sigma) s = rng.uniform(0.05, 5.0);
    const Matrix K = gram({fam, sigma}, X).entries();
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * K.cwiseAbs().maxCoeff());
    CHECK(min_eigenvalue(K) >= -1e-8 * K.norm());
  }
}
