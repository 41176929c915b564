#include <doctest.h>

#include "cridge/asymptotics.hpp"
#include "cridge/confounding.hpp"
#include "support.hpp"

using namespace cridge;
using doctest::Approx;

namespace {

// Summaries of beta_stat = beta + Gamma with the given vectors.
ScalarSummaries from_vectors(const Vector& beta, const Vector& gamma, double sigma_stat_sq = 1.0) {
  return ScalarSummaries::from_moments(beta.squaredNorm(), gamma.squaredNorm(), gamma.dot(beta),
                                       sigma_stat_sq);
}

}  // namespace

TEST_CASE("confounding strength examples") {
  const Vector beta_stat = (Vector(3) << 1.0, -2.0, 0.5).finished();
  CHECK(confounding_strength(from_vectors(beta_stat, Vector::Zero(3))) == 0);
  CHECK(confounding_strength(from_vectors(beta_stat / 2, beta_stat / 2)) ==
        Approx(0.5).epsilon(1e-15));
  CHECK(confounding_strength(from_vectors(2 * beta_stat, -beta_stat)) ==
        Approx(-1.0).epsilon(1e-15));
  CHECK(confounding_strength(from_vectors(Vector::Zero(3), beta_stat)) ==
        Approx(1.0).epsilon(1e-15));
}

TEST_CASE("structural confounding examples") {
  const Vector v = (Vector(2) << 0.3, 0.4).finished();
  CHECK(structural_confounding(from_vectors(v, Vector::Zero(2))) == 0);
  CHECK(structural_confounding(from_vectors(Vector::Zero(2), v)) == 1);
  const Vector beta = (Vector(2) << 1.0, 0.0).finished();
  const Vector gamma = (Vector(2) << 0.0, 0.7).finished();
  const auto s = from_vectors(beta, gamma);
  CHECK(structural_confounding(s) == Approx(confounding_strength(s)).epsilon(1e-12));
}

TEST_CASE("min-norm regime labels") {
  CHECK(min_norm_regime(ScalarSummaries::from_confounding(2.0, 0.0, 0.0, 1.0)) ==
        MinNormRegime::BeatsNullBothRegimes);
  CHECK(min_norm_regime(ScalarSummaries::from_confounding(1.0, 0.4, 0.0, 1.0)) ==
        MinNormRegime::BeatsNullUnderOnly);
  CHECK(min_norm_regime(ScalarSummaries::from_confounding(1.0, 0.6, 0.0, 1.0)) ==
        MinNormRegime::NeverBeatsNull);
  CHECK(to_string(MinNormRegime::NeverBeatsNull) == "NeverBeatsNull");
}

TEST_CASE("property: zeta partition matches the geometry of beta and beta_stat") {
  Rng rng(21);
  int above = 0;
  int below = 0;
  for (int k = 0; k < 2000; ++k) {
    const Index d = 1 + static_cast<Index>(rng.bits() % 5);
    const Vector beta = testing::gaussian_vector(rng, d);
    const Vector gamma = 3 * rng.uniform() * testing::gaussian_vector(rng, d);
    const Vector beta_stat = beta + gamma;
    const double zeta = confounding_strength(from_vectors(beta, gamma));
    const double inner = beta.dot(beta_stat);
    REQUIRE((zeta >= 1) == (inner <= 0));
    REQUIRE((zeta <= 0) == (inner >= beta_stat.squaredNorm()));
    above += zeta >= 1;
    below += zeta <= 0;
  }
  CHECK(above > 50);
  CHECK(below > 50);
}

TEST_CASE("property: signal-to-noise identities") {
  Rng rng(22);
  for (int k = 0; k < 500; ++k) {
    const Vector beta = testing::gaussian_vector(rng, 4);
    const Vector gamma = testing::gaussian_vector(rng, 4);
    const auto s = from_vectors(beta, gamma, 0.1 + rng.uniform());
    const double tol = 1e-12 * (1 + s.snr_stat * (1 + std::abs(s.zeta)));
    REQUIRE(std::abs(s.s_min_norm - (1 - 2 * s.zeta) * s.snr_stat) <= tol);
    REQUIRE(std::abs(s.snr_caus - (1 - s.zeta) * s.snr_stat) <= tol);
  }
}

TEST_CASE("property: structural and statistical confounding agree when Gamma is orthogonal to beta") {
  Rng rng(23);
  for (int k = 0; k < 200; ++k) {
    const Vector beta = testing::gaussian_vector(rng, 5);
    Vector gamma = testing::gaussian_vector(rng, 5);
    gamma -= gamma.dot(beta) / beta.squaredNorm() * beta;
    const auto s = ScalarSummaries::from_moments(beta.squaredNorm(), gamma.squaredNorm(), 0.0, 1.0);
    REQUIRE(std::abs(structural_confounding(s) - confounding_strength(s)) <= 1e-12);
  }
}

TEST_CASE("property: regime labels agree with the limiting min-norm risk") {
  // Away from the threshold, compare min-norm and null excess over a dense gamma grid.
  std::vector<double> under, over;
  for (double g = 0.001; g < 0.95; g *= 1.2) under.push_back(g);
  for (double g = 1.05; g < 1e4; g *= 1.2) over.push_back(g);

  for (double snr : {0.5, 1.0, 3.0}) {
    for (double zeta : {-1.0, -0.2, 0.0, 0.2, 0.45, 0.55, 0.8, 1.0, 1.5}) {
      const double eta = (zeta < 0 || zeta > 1) ? zeta * (1 - zeta) * snr : 0.0;
      const auto s = ScalarSummaries::from_confounding(snr, zeta, eta, 1.0);
      auto beats = [&](double gamma) {
        const LimitSpec spec(gamma, s);
        return limiting_min_norm(spec, Target::Causal).total < null_risk(spec, Target::Causal).total;
      };
      bool beats_under = false;
      bool beats_over = false;
      for (double g : under) beats_under = beats_under || beats(g);
      for (double g : over) beats_over = beats_over || beats(g);
      CAPTURE(snr);
      CAPTURE(zeta);
      switch (min_norm_regime(s)) {
        case MinNormRegime::BeatsNullBothRegimes:
          CHECK(beats_under);
          CHECK(beats_over);
          break;
        case MinNormRegime::BeatsNullUnderOnly:
          if (s.s_min_norm > 1e-3) CHECK(beats_under);
          CHECK_FALSE(beats_over);
          break;
        case MinNormRegime::NeverBeatsNull:
          CHECK_FALSE(beats_under);
          CHECK_FALSE(beats_over);
          break;
      }
    }
  }
}
