#include <doctest.h>

#include "cridge/estimators.hpp"
#include "support.hpp"

using namespace cridge;
using doctest::Approx;

namespace {

// Direct dense evaluation of the conditional decomposition, used as an oracle
// for the spectral implementation.
BiasVariance dense_decomposition(const Matrix& x, const DerivedStatistical& derived,
                                 const Vector& beta, double lambda, Target target) {
  const Index n = x.rows();
  const Index d = x.cols();
  const Matrix s_hat = x.transpose() * x / static_cast<double>(n);
  Matrix pi;
  if (lambda > 0) {
    pi = Matrix::Identity(d, d) - (s_hat + lambda * Matrix::Identity(d, d)).inverse() * s_hat;
  } else {
    const Matrix pinv = s_hat.completeOrthogonalDecomposition().pseudoInverse();
    pi = Matrix::Identity(d, d) - pinv * s_hat;
  }
  const Vector b = target == Target::Causal ? beta : derived.beta_stat;
  const Vector g = target == Target::Causal ? derived.gamma : Vector::Zero(d);
  const Vector err = pi * b - (Matrix::Identity(d, d) - pi) * g;
  Matrix a;
  if (lambda > 0) {
    const Matrix r = (s_hat + lambda * Matrix::Identity(d, d)).inverse();
    a = s_hat * r * r;
  } else {
    a = s_hat.completeOrthogonalDecomposition().pseudoInverse();
  }
  return {err.dot(derived.sigma * err),
          derived.sigma_stat_sq / static_cast<double>(n) * (a * derived.sigma).trace()};
}

}  // namespace

TEST_CASE("ridge on a two-point design") {
  const Matrix x = Matrix::Ones(2, 1);
  const Vector y = Vector::Ones(2);
  CHECK(ridge_fit(x, y, 0.5)(0) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ridge_fit(x, y, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ridge_fit(x, y, -1.0), std::invalid_argument);
}

TEST_CASE("ridge with huge lambda shrinks to zero") {
  Rng rng(1);
  const Matrix x = testing::gaussian_matrix(rng, 20, 5);
  const Vector y = testing::gaussian_vector(rng, 20);
  const Vector fit = ridge_fit(x, y, 1e9);
  CHECK(fit.norm() <= (x.transpose() * y).norm() / (20 * 1e9));
}

TEST_CASE("min-norm solutions") {
  SUBCASE("zero response") {
    Rng rng(2);
    CHECK(min_norm_fit(testing::gaussian_matrix(rng, 4, 7), Vector::Zero(4)).norm() == 0);
  }
  SUBCASE("single equation in two unknowns") {
    Matrix x(1, 2);
    x << 1, 1;
    const Vector fit = min_norm_fit(x, Vector::Constant(1, 2.0));
    CHECK(fit(0) == Approx(1.0).epsilon(1e-14));
    CHECK(fit(1) == Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("consistent overdetermined system") {
    Rng rng(3);
    const Matrix x = testing::gaussian_matrix(rng, 30, 6);
    const Vector truth = testing::gaussian_vector(rng, 6);
    CHECK((min_norm_fit(x, x * truth) - truth).norm() < 1e-12 * truth.norm() * 100);
  }
  SUBCASE("matches the dense pseudo-inverse on a rank-deficient design") {
    Rng rng(4);
    Matrix x = testing::gaussian_matrix(rng, 8, 5);
    x.col(4) = x.col(0) + x.col(1);
    const Vector y = testing::gaussian_vector(rng, 8);
    const Vector oracle = x.completeOrthogonalDecomposition().pseudoInverse() * y;
    CHECK((min_norm_fit(x, y) - oracle).norm() < 1e-10 * (1 + oracle.norm()));
  }
}

TEST_CASE("property: ridgeless ridge agrees with min-norm") {
  Rng rng(5);
  for (auto [n, d] : std::vector<std::pair<Index, Index>>{{50, 10}, {10, 50}, {200, 80}, {40, 120}}) {
    for (int k = 0; k < 5; ++k) {
      const Matrix x = testing::gaussian_matrix(rng, n, d);
      const Vector y = testing::gaussian_vector(rng, n);
      const Vector mn = min_norm_fit(x, y);
      REQUIRE((ridge_fit(x, y, 1e-8) - mn).norm() <= 1e-5 * (1 + mn.norm()));
    }
  }
}

TEST_CASE("property: min-norm interpolates when n < d") {
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Index n = 2 + static_cast<Index>(rng.bits() % 30);
    const Index d = n + 1 + static_cast<Index>(rng.bits() % 60);
    const Matrix x = testing::gaussian_matrix(rng, n, d);
    const Vector y = testing::gaussian_vector(rng, n);
    REQUIRE((x * min_norm_fit(x, y) - y).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("exact risk of reference predictors") {
  Rng rng(7);
  const Vector beta_stat = testing::gaussian_vector(rng, 6);
  const auto p = build_isotropic_model(beta_stat, 0.8, 0.3, 0.05);
  const auto d = derive_statistical(p);
  const auto s = summarize(d, p.beta());

  const auto oracle = exact_risk(p.beta(), d, p.beta(), Target::Causal);
  CHECK(oracle.excess() == Approx(0.0).epsilon(1e-14));
  CHECK(oracle.total == Approx(0.8 + s.omega_sq).epsilon(1e-13));
  CHECK(oracle.provenance == Provenance::Exact);

  CHECK(exact_risk(d.beta_stat, d, p.beta(), Target::Statistical).excess() ==
        Approx(0.0).epsilon(1e-14));
  CHECK(exact_risk(Vector::Zero(6), d, p.beta(), Target::Causal).total ==
        Approx(s.r_sq + 0.8 + s.omega_sq).epsilon(1e-13));
  CHECK(exact_risk(Vector::Zero(6), d, p.beta(), Target::Statistical).total ==
        Approx(s.s_sq + 0.8).epsilon(1e-13));
}

TEST_CASE("conditional decomposition matches a dense oracle") {
  Rng rng(8);
  const Index d = 12;
  const CausalModelParams p(testing::gaussian_matrix(rng, d, d + 3),
                            testing::gaussian_vector(rng, d + 3), testing::gaussian_vector(rng, d),
                            0.5);
  const auto derived = derive_statistical(p);
  for (Index n : {6, 12, 40}) {
    const Matrix x = testing::gaussian_matrix(rng, n, d);
    for (double lambda : {0.0, 0.05, 1.0, 20.0}) {
      if (lambda == 0.0 && n == d) continue;  // ill-conditioned square case
      for (Target t : {Target::Causal, Target::Statistical}) {
        const auto got = conditional_bias_variance(x, derived, p.beta(), lambda, t);
        const auto want = dense_decomposition(x, derived, p.beta(), lambda, t);
        CAPTURE(n);
        CAPTURE(lambda);
        CHECK(got.bias == Approx(want.bias).epsilon(1e-8));
        CHECK(got.variance == Approx(want.variance).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("conditional decomposition limits") {
  Rng rng(9);
  const auto p = build_isotropic_model(testing::gaussian_vector(rng, 5), 1.0, 0.0, 0.0);
  const auto d = derive_statistical(p);
  const Matrix x = testing::gaussian_matrix(rng, 40, 5);
  CHECK(conditional_bias_variance(x, d, p.beta(), 1e9, Target::Causal).variance <= 1e-12);
  CHECK(conditional_bias_variance(x, d, p.beta(), 0.0, Target::Statistical).bias < 1e-20);
  CHECK(conditional_bias_variance(x, d, p.beta(), 0.0, Target::Causal).bias < 1e-20);
}

TEST_CASE("property: variance does not depend on the target") {
  Rng rng(10);
  for (int k = 0; k < 20; ++k) {
    const Index d = 3 + static_cast<Index>(rng.bits() % 10);
    const Index n = 2 + static_cast<Index>(rng.bits() % 25);
    const auto p = build_isotropic_model(testing::gaussian_vector(rng, d), 1.0, 0.4, 0.0);
    const auto derived = derive_statistical(p);
    const Matrix x = testing::gaussian_matrix(rng, n, d);
    for (double lambda : {0.0, 0.1, 2.0}) {
      REQUIRE(conditional_bias_variance(x, derived, p.beta(), lambda, Target::Causal).variance ==
              conditional_bias_variance(x, derived, p.beta(), lambda, Target::Statistical).variance);
    }
  }
}

TEST_CASE("property: decomposition equals averaged exact risk over Y|X") {
  Rng rng(11);
  const Index d = 10;
  const auto p = build_isotropic_model(testing::gaussian_vector(rng, d), 1.0, 0.35, 0.0);
  const auto derived = derive_statistical(p);
  const double noise = std::sqrt(derived.sigma_stat_sq);
  for (Index n : {25, 6}) {
    const Matrix x = testing::gaussian_matrix(rng, n, d);
    const Vector mean_y = x * derived.beta_stat;
    for (double lambda : {0.0, 0.3}) {
      std::vector<double> causal, stat;
      for (int r = 0; r < 2000; ++r) {
        const Vector y = mean_y + noise * testing::gaussian_vector(rng, n);
        const Vector fit = lambda > 0 ? ridge_fit(x, y, lambda) : min_norm_fit(x, y);
        causal.push_back(exact_risk(fit, derived, p.beta(), Target::Causal).excess());
        stat.push_back(exact_risk(fit, derived, p.beta(), Target::Statistical).excess());
      }
      const auto c = testing::mean_se(causal);
      const auto s = testing::mean_se(stat);
      const auto bc = conditional_bias_variance(x, derived, p.beta(), lambda, Target::Causal);
      const auto bs = conditional_bias_variance(x, derived, p.beta(), lambda, Target::Statistical);
      CHECK(std::abs(c.mean - (bc.bias + bc.variance)) <= 3 * c.se);
      CHECK(std::abs(s.mean - (bs.bias + bs.variance)) <= 3 * s.se);
    }
  }
}

TEST_CASE("monte carlo risk") {
  Rng rng(12);
  const auto p = build_isotropic_model(testing::gaussian_vector(rng, 4), 0.5, 0.4, 0.0);
  const auto derived = derive_statistical(p);
  const auto s = summarize(derived, p.beta());

  CHECK_THROWS_AS(monte_carlo_risk(p.beta(), p, Target::Causal, 1, 1), std::invalid_argument);

  SUBCASE("oracle predictor under intervention") {
    const auto mc = monte_carlo_risk(p.beta(), p, Target::Causal, 40000, 2);
    CHECK(mc.provenance == Provenance::MonteCarlo);
    CHECK(std::abs(mc.total - (0.5 + s.omega_sq)) <= 4 * *mc.std_error);
  }
  SUBCASE("agrees with the exact risk for arbitrary predictors") {
    for (int k = 0; k < 4; ++k) {
      const Vector b = testing::gaussian_vector(rng, 4);
      for (Target t : {Target::Causal, Target::Statistical}) {
        const auto mc = monte_carlo_risk(b, p, t, 20000, 10 + k);
        const auto exact = exact_risk(b, derived, p.beta(), t);
        CHECK(std::abs(mc.total - exact.total) <= 4 * *mc.std_error);
      }
    }
  }
  SUBCASE("standard error scales as one over root m") {
    const Vector b = Vector::Zero(4);
    const double se1 = *monte_carlo_risk(b, p, Target::Causal, 20000, 3).std_error;
    const double se2 = *monte_carlo_risk(b, p, Target::Causal, 40000, 4).std_error;
    CHECK(se1 / se2 == Approx(std::sqrt(2.0)).epsilon(0.3));
  }
}
