#include <cmath>

#include "ckl/alignment.hpp"
#include "ckl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ckl;

TEST_CASE("ideal kernel examples") {
  Labels y(2);
  y << 1, -1;
  const auto t = ideal_kernel(y);
  CHECK(t.raw(0, 0) == 1.0);
  CHECK(t.raw(0, 1) == -1.0);
  CHECK(t.raw(1, 0) == -1.0);
  CHECK(t.raw(1, 1) == 1.0);
  CHECK(t.centered.centered());
  CHECK(t.norm_c > 0.0);

  Labels y3(3);
  y3 << 1, 1, -1;
  const auto t3 = ideal_kernel(y3);
  CHECK(t3.raw.entries().trace() == doctest::Approx(3.0));
  Eigen::FullPivLU<Matrix> lu(t3.raw.entries());
  CHECK(lu.rank() == 1);

  Labels same(2);
  same << 1, 1;
  CHECK_THROWS_AS(ideal_kernel(same), DegenerateTargetError);
  Labels one(1);
  one << 1;
  CHECK_THROWS_AS(ideal_kernel(one), std::invalid_argument);
  Labels bad(2);
  bad << 1, 0;
  CHECK_THROWS_AS(ideal_kernel(bad), std::invalid_argument);
}

TEST_CASE("centered alignment examples") {
  Rng rng(11);
  const Labels y = oracle::random_labels(rng, 10);
  const auto t = ideal_kernel(y);
  CHECK(centered_alignment(t.raw, t.raw) == doctest::Approx(1.0));
  CHECK(centered_alignment(GramMatrix(Matrix(-t.raw.entries())), t.raw) == doctest::Approx(-1.0));
  // constant kernels center to zero
  CHECK_THROWS_AS(centered_alignment(GramMatrix(Matrix::Ones(10, 10)), t.raw), DegenerateAlignmentError);
  CHECK_THROWS_AS(centered_alignment(GramMatrix(Matrix::Identity(3, 3)), t.raw), std::invalid_argument);
  // flag set means no re-centering; an already centered input gives the same value
  const Matrix K = oracle::random_psd(rng, 10, 4);
  CHECK(centered_alignment(GramMatrix(K), t.raw) ==
        doctest::Approx(centered_alignment(center(GramMatrix(K)), t.centered)).epsilon(1e-12));
}

TEST_CASE("F and its gradient match the definitions") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.below(10));
    const Labels y = oracle::random_labels(rng, n);
    const auto t = ideal_kernel(y);
    const Matrix Kc = center(oracle::random_psd(rng, n, 3));
    CHECK(big_f(GramMatrix(Kc, true), t) == doctest::Approx(oracle::f_value(Kc, y)).epsilon(1e-12));
    const Matrix G = big_f_prime(Kc, t);
    // closed form (T_c - |K|^-2 <K,T_c> K) / (|K| |T_c|)
    const Matrix& Tc = t.centered.entries();
    const double kn = Kc.norm();
    const Matrix expect = (Tc - (Kc.cwiseProduct(Tc).sum() / (kn * kn)) * Kc) / (kn * Tc.norm());
    CHECK((G - expect).norm() <= 1e-12 * expect.norm());
    // F is scale invariant, so the gradient is orthogonal to K
    CHECK(std::abs(frob_inner(G, Kc)) <= 1e-10 * G.norm() * kn);
  }
}

TEST_CASE("F requires centered input") {
  Labels y(3);
  y << 1, -1, 1;
  const auto t = ideal_kernel(y);
  CHECK_THROWS_AS(big_f(GramMatrix(Matrix::Identity(3, 3)), t), std::invalid_argument);
  CHECK_THROWS_AS(big_f(GramMatrix::zeros(3, true), t), DegenerateAlignmentError);
  CHECK_THROWS_AS(big_f_prime(GramMatrix::zeros(3, true), t), DegenerateAlignmentError);
}

TEST_CASE("step objective equals F along the ray") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.below(8));
    const Labels y = oracle::random_labels(rng, n);
    const auto t = ideal_kernel(y);
    const Matrix K = center(oracle::random_psd(rng, n, 2));
    const Matrix Kp = center(oracle::random_psd(rng, n, 2));
    const auto p = step_products(K, Kp, t);
    for (double eta : {0.0, 0.1, 0.5, 1.0, 3.0}) {
      CHECK(step_objective(p, eta) / t.norm_c == doctest::Approx(oracle::f_value(K + eta * Kp, y)).epsilon(1e-10));
    }
  }
}

TEST_CASE("line search candidates") {
  SUBCASE("zero step when the direction cannot help") {
    // K' = -K: F(K + eta K') = F(K) sign-preserving until eta = 1, so no gain
    Rng rng(14);
    const Labels y = oracle::random_labels(rng, 6);
    const auto t = ideal_kernel(y);
    const Matrix K = center(oracle::random_psd(rng, 6, 2));
    CHECK(line_search_eta(step_products(K, Matrix(-K), t), 1.0) == 0.0);
  }
  SUBCASE("stationary point formula") {
    StepProducts p{1.0, 2.0, 1.0, 0.5, 4.0};
    // (ad - bc)/(bd - ae) = (0.5 - 2)/(1 - 4) = 0.5
    CHECK(stationary_eta(p) == doctest::Approx(0.5));
    StepProducts flat{1.0, 2.0, 1.0, 2.0, 4.0};  // bd - ae = 0
    CHECK(stationary_eta(flat) == 0.0);
  }
  SUBCASE("direction equal to the target takes the largest step") {
    Labels y(4);
    y << 1, -1, 1, -1;
    const auto t = ideal_kernel(y);
    const Matrix K = center(Matrix(Matrix::Identity(4, 4)));
    const double eta = line_search_eta(step_products(K, t.centered.entries(), t), 1.0);
    CHECK(eta == 1.0);
  }
}

TEST_CASE("alignment invariances") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(15));
    const Labels y = oracle::random_labels(rng, n);
    const auto t = ideal_kernel(y);
    const Matrix K = oracle::random_psd(rng, n, 3);
    const double a = centered_alignment(GramMatrix(K), t.raw);
    CHECK(a >= -1.0);
    CHECK(a <= 1.0);
    const double s = std::exp(rng.uniform(-5.0, 5.0));
    CHECK(centered_alignment(GramMatrix(Matrix(s * K)), t.raw) == doctest::Approx(a).epsilon(1e-10));
    const double c = rng.normal() * 5.0;
    CHECK(centered_alignment(GramMatrix(Matrix(K + c * Matrix::Ones(n, n))), t.raw) ==
          doctest::Approx(a).epsilon(1e-9));
  }
}
