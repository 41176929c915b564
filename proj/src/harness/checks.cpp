#include "cridge/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "cridge/asymptotics.hpp"
#include "cridge/confounding.hpp"
#include "cridge/estimators.hpp"
#include "cridge/harness/config.hpp"
#include "cridge/harness/csv.hpp"
#include "cridge/harness/oracles.hpp"
#include "cridge/harness/parallel.hpp"
#include "cridge/model.hpp"
#include "cridge/optimal_reg.hpp"
#include "cridge/rng.hpp"

namespace cridge::harness {

namespace {

const std::vector<double> kGammaGrid{0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2, 3, 10};
const std::vector<double> kLambdaGrid{0.01, 0.1, 0.5, 1, 5, 50};
const std::vector<double> kQuickGammaGrid{0.3, 0.9, 1.5, 3};
const std::vector<double> kQuickLambdaGrid{0.1, 1, 5};
const std::vector<double> kZetaGrid{-0.5, -0.25, 0, 0.25, 0.5, 0.75, 0.9};

struct Context {
  const CheckOptions& options;

  const std::vector<double>& gammas() const { return options.quick ? kQuickGammaGrid : kGammaGrid; }
  const std::vector<double>& lambdas() const {
    return options.quick ? kQuickLambdaGrid : kLambdaGrid;
  }
  std::vector<double> snrs() const {
    return options.quick ? std::vector<double>{1.0} : std::vector<double>{0.5, 1.0, 4.0};
  }
  std::uint64_t seed(std::uint64_t check_index) const {
    return substream_seed(options.seed, check_index, 0);
  }

  // Applies the configured perturbation to the named quantity.
  double perturbed(const char* name, double value) const {
    if (options.perturb && options.perturb->name == name) return value * (1 + options.perturb->eps);
    return value;
  }

  double m(double lambda, double gamma) const { return perturbed("m", mp_m(lambda, gamma)); }
  double m_prime(double lambda, double gamma) const {
    return perturbed("m_prime", mp_m_prime(lambda, gamma));
  }
  double derivative(double lambda, const LimitSpec& spec) const {
    return perturbed("risk_derivative", risk_derivative(lambda, spec));
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Counts cases and keeps the first failure plus the worst observed ratio of
// error to tolerance.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++cases_;
    if (!ok) {
      ++failures_;
      if (first_.empty()) first_ = what;
    }
  }

  void expect_within(double error, double tolerance, const std::string& what) {
    const double ratio = tolerance > 0 ? error / tolerance : (error > 0 ? INFINITY : 0);
    if (!(ratio <= worst_)) worst_ = std::isnan(ratio) ? INFINITY : std::max(worst_, ratio);
    expect(error <= tolerance, what + " error " + num(error) + " > tol " + num(tolerance));
  }

  CheckResult finish(std::string name) const {
    CheckResult r;
    r.name = std::move(name);
    r.cases = cases_;
    r.passed = failures_ == 0 && cases_ > 0;
    std::ostringstream os;
    os << cases_ << " cases, " << failures_ << " failed";
    if (worst_ > 0) os << ", worst error/tol " << num(worst_);
    if (!first_.empty()) os << "; first failure: " << first_;
    if (cases_ == 0) os << "; no cases evaluated";
    r.detail = os.str();
    return r;
  }

 private:
  long cases_ = 0;
  long failures_ = 0;
  double worst_ = 0;
  std::string first_;
};

Vector random_vector(Rng& rng, Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.normal();
  return v;
}

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

ScalarSummaries swept(double zeta, double snr) {
  return ScalarSummaries::from_confounding(1.0, zeta, sweep_alignment(zeta, 1.0), 1.0 / snr);
}

// --- model -------------------------------------------------------------------

CheckResult model_round_trip(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const int per_dim = ctx.options.quick ? 5 : 20;
  for (Index d : {2, 5, 20}) {
    for (int k = 0; k < per_dim; ++k) {
      const Vector beta_stat = random_vector(rng, d);
      const double s_sq = beta_stat.squaredNorm();
      const double sigma = 0.5 + 1.5 * rng.uniform();
      const double zeta = -1.0 + 2.5 * rng.uniform();
      const double eta = zeta * (1 - zeta) * s_sq - rng.uniform() * s_sq;
      const auto params = build_isotropic_model(beta_stat, sigma, zeta, eta);
      const auto derived = derive_statistical(params);
      const auto s = summarize(derived, params.beta());
      const double scale = std::max(1.0, s_sq);
      const std::string where = "d=" + std::to_string(d) + " zeta=" + num(zeta);
      t.expect_within((derived.beta_stat - beta_stat).cwiseAbs().maxCoeff(), 1e-10 * scale,
                      where + " beta_stat");
      t.expect_within(std::abs(s.sigma_stat_sq - sigma), 1e-10, where + " sigma_stat_sq");
      t.expect_within(std::abs(s.zeta - zeta), 1e-10, where + " zeta");
      t.expect_within(std::abs(s.eta - eta), 1e-10 * scale, where + " eta");
    }
  }
  return t.finish("model.round_trip");
}

CheckResult model_noise_nonnegative(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const int trials = ctx.options.quick ? 10 : 40;
  for (int k = 0; k < trials; ++k) {
    const Index d = 2 + static_cast<Index>(rng.bits() % 6);
    const Index l = d + static_cast<Index>(rng.bits() % 4);
    Matrix mixing = random_matrix(rng, d, l);
    if (k % 3 == 0) mixing.row(0) = mixing.row(1);  // rank-deficient Sigma
    const double sigma_sq = 0.1 + rng.uniform();
    const CausalModelParams params(mixing, random_vector(rng, l), random_vector(rng, d), sigma_sq);
    const auto derived = derive_statistical(params);
    t.expect(derived.sigma_stat_sq >= sigma_sq,
             "sigma_stat_sq " + num(derived.sigma_stat_sq) + " < sigma_sq " + num(sigma_sq));
    t.expect_within((derived.beta_stat - params.beta() - derived.gamma).norm(),
                    1e-12 * (1 + derived.beta_stat.norm()), "beta_stat = beta + Gamma");
    t.expect((derived.sigma - derived.sigma.transpose()).norm() == 0, "Sigma not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(derived.sigma, Eigen::EigenvaluesOnly);
    t.expect(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff(),
             "Sigma has a negative eigenvalue");
  }
  return t.finish("model.noise_nonnegative");
}

CheckResult model_summary_identities(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const int trials = ctx.options.quick ? 10 : 50;
  for (int k = 0; k < trials; ++k) {
    const Index d = 2 + static_cast<Index>(rng.bits() % 8);
    const CausalModelParams params(random_matrix(rng, d, d + 2), random_vector(rng, d + 2),
                                   random_vector(rng, d), 0.2 + rng.uniform());
    const auto s = summarize(derive_statistical(params), params.beta());
    const double scale = 1 + s.s_sq + s.r_sq + s.omega_sq;
    t.expect_within(std::abs(s.s_sq - (s.r_sq + s.omega_sq + 2 * s.eta)), 1e-10 * scale,
                    "s_sq = r_sq + omega_sq + 2 eta");
    t.expect_within(std::abs(s.zeta - (s.omega_sq + s.eta) / s.s_sq),
                    1e-10 * scale / s.s_sq, "zeta = (omega_sq + eta)/s_sq");
    t.expect_within(std::abs(s.snr_caus - (1 - s.zeta) * s.snr_stat), 1e-10 * (1 + s.snr_stat),
                    "snr_caus = (1 - zeta) snr_stat");
    t.expect(s.eta * s.eta <= s.r_sq * s.omega_sq * (1 + 1e-12) + 1e-300,
             "eta^2 <= r_sq omega_sq");
  }
  return t.finish("model.summary_identities");
}

CheckResult model_observational_conditional(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const Index d = 4;
  const Index l = 6;
  const CausalModelParams params(random_matrix(rng, d, l), random_vector(rng, l),
                                 random_vector(rng, d), 0.5);
  const auto derived = derive_statistical(params);
  const Index n = ctx.options.quick ? 10000 : 40000;
  const Dataset data = sample_observational(params, n, ctx.seed(index) + 1);

  const Matrix gram = data.x.transpose() * data.x;
  const Eigen::LLT<Matrix> llt(gram);
  const Vector ols = llt.solve(data.x.transpose() * data.y);
  const Matrix gram_inv = llt.solve(Matrix::Identity(d, d));
  const double rss = (data.y - data.x * ols).squaredNorm();
  const double resid_var = rss / static_cast<double>(n - d);
  for (Index j = 0; j < d; ++j) {
    const double se = std::sqrt(derived.sigma_stat_sq * gram_inv(j, j));
    t.expect_within(std::abs(ols(j) - derived.beta_stat(j)), 3 * se,
                    "OLS coefficient " + std::to_string(j));
  }
  const double se_var = derived.sigma_stat_sq * std::sqrt(2.0 / static_cast<double>(n - d));
  t.expect_within(std::abs(resid_var - derived.sigma_stat_sq), 3 * se_var, "residual variance");
  return t.finish("model.observational_conditional");
}

CheckResult model_interventional_conditional(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const Index d = 4;
  const Index l = 6;
  const CausalModelParams params(random_matrix(rng, d, l), random_vector(rng, l),
                                 random_vector(rng, d), 0.5);
  const Index n = ctx.options.quick ? 10000 : 40000;
  const Dataset data = sample_interventional(params, n, ctx.seed(index) + 1);
  const Vector resid = data.y - data.x * params.beta();
  const double target = params.alpha().squaredNorm() + params.sigma_sq();

  const Vector sq = resid.array().square();
  const double mean_sq = sq.mean();
  const double se_sq = std::sqrt((sq.array() - mean_sq).square().sum() / (n - 1) / n);
  t.expect_within(std::abs(mean_sq - target), 3 * se_sq, "Var(y - x^T beta)");
  for (Index j = 0; j < d; ++j) {
    const Vector prod = data.x.col(j).cwiseProduct(resid);
    const double mean = prod.mean();
    const double se = std::sqrt((prod.array() - mean).square().sum() / (n - 1) / n);
    t.expect_within(std::abs(mean), 3 * se, "Cov(x_" + std::to_string(j + 1) + ", residual)");
  }
  return t.finish("model.interventional_conditional");
}

// --- estimators --------------------------------------------------------------

CheckResult estimators_ridgeless(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const std::vector<std::pair<Index, Index>> shapes{{60, 20}, {20, 60}, {100, 40}, {30, 90}};
  for (auto [n, d] : shapes) {
    const Matrix x = random_matrix(rng, n, d);
    const Vector y = random_vector(rng, n);
    const Vector mn = min_norm_fit(x, y);
    const Vector ridge = ridge_fit(x, y, 1e-8);
    t.expect_within((ridge - mn).norm(), 1e-5 * (1 + mn.norm()),
                    "n=" + std::to_string(n) + " d=" + std::to_string(d));
  }
  return t.finish("estimators.ridgeless_consistency");
}

CheckResult estimators_interpolation(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  for (auto [n, d] : std::vector<std::pair<Index, Index>>{{10, 30}, {50, 51}, {5, 200}}) {
    const Matrix x = random_matrix(rng, n, d);
    const Vector y = random_vector(rng, n);
    const Vector fit = min_norm_fit(x, y);
    t.expect_within((x * fit - y).norm(), 1e-8 * y.norm(),
                    "n=" + std::to_string(n) + " d=" + std::to_string(d));
  }
  return t.finish("estimators.interpolation");
}

CheckResult estimators_decomposition(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const Index d = 20;
  const auto params = build_isotropic_model(random_vector(rng, d), 1.0, 0.3, 0.0);
  const auto derived = derive_statistical(params);
  const Index redraws = ctx.options.quick ? 500 : 2000;
  const std::vector<Index> sizes = ctx.options.quick ? std::vector<Index>{40}
                                                     : std::vector<Index>{40, 12, 80};
  const double noise_sd = std::sqrt(derived.sigma_stat_sq);
  for (Index n : sizes) {
    const Matrix x = random_matrix(rng, n, d);
    const Vector mean_y = x * derived.beta_stat;
    for (double lambda : {0.0, 0.1, 1.0}) {
      std::vector<double> causal(redraws);
      std::vector<double> stat(redraws);
      for (Index r = 0; r < redraws; ++r) {
        const Vector y = mean_y + noise_sd * random_vector(rng, n);
        const Vector fit = lambda > 0 ? ridge_fit(x, y, lambda) : min_norm_fit(x, y);
        causal[r] = exact_risk(fit, derived, params.beta(), Target::Causal).total;
        stat[r] = exact_risk(fit, derived, params.beta(), Target::Statistical).total;
      }
      for (int k = 0; k < 2; ++k) {
        const Target target = k == 0 ? Target::Causal : Target::Statistical;
        const auto& xs = k == 0 ? causal : stat;
        double mean = 0;
        for (double v : xs) mean += v;
        mean /= static_cast<double>(redraws);
        double ss = 0;
        for (double v : xs) ss += (v - mean) * (v - mean);
        const double se = std::sqrt(ss / (redraws - 1) / redraws);
        const auto bv = conditional_bias_variance(x, derived, params.beta(), lambda, target);
        const double constant = exact_risk(params.beta(), derived, params.beta(), target).constant;
        const double exact = k == 0 ? bv.bias + bv.variance + constant
                                    : bv.bias + bv.variance + derived.sigma_stat_sq;
        t.expect_within(std::abs(mean - exact), 3 * se,
                        std::string(to_string(target)) + " n=" + std::to_string(n) +
                            " lambda=" + num(lambda));
      }
    }
  }
  return t.finish("estimators.decomposition_consistency");
}

CheckResult estimators_variance_independence(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const Index d = 15;
  const auto params = build_isotropic_model(random_vector(rng, d), 0.7, 0.4, 0.1);
  const auto derived = derive_statistical(params);
  for (Index n : {8, 15, 45}) {
    const DesignSpectrum design(random_matrix(rng, n, d));
    for (double lambda : {0.0, 0.01, 0.5, 3.0}) {
      const auto c = design.bias_variance(derived, params.beta(), lambda, Target::Causal);
      const auto s = design.bias_variance(derived, params.beta(), lambda, Target::Statistical);
      t.expect(c.variance == s.variance, "n=" + std::to_string(n) + " lambda=" + num(lambda));
    }
  }
  return t.finish("estimators.variance_target_independence");
}

// --- asymptotics ---------------------------------------------------------------

CheckResult asymptotics_fixed_point(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double gamma : ctx.gammas()) {
    for (double lambda : ctx.lambdas()) {
      const double m = ctx.m(lambda, gamma);
      const double residual = gamma * lambda * m * m + (1 - gamma + lambda) * m - 1;
      t.expect_within(std::abs(residual), 1e-10, "gamma=" + num(gamma) + " lambda=" + num(lambda));
    }
  }
  return t.finish("asymptotics.mp_fixed_point");
}

CheckResult asymptotics_m_prime(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double gamma : {0.3, 1.0, 3.0}) {
    for (double lambda : {0.1, 1.0, 10.0}) {
      const double fd =
          -oracle::central_difference([&](double l) { return mp_m(l, gamma); }, lambda, 1e-5);
      const double analytic = ctx.m_prime(lambda, gamma);
      const std::string where = "gamma=" + num(gamma) + " lambda=" + num(lambda);
      t.expect(analytic > 0, where + " m' not positive");
      t.expect_within(std::abs(analytic - fd), 1e-6 * std::abs(fd), where);
    }
  }
  return t.finish("asymptotics.mp_m_prime_finite_difference");
}

CheckResult asymptotics_variance_coincidence(const Context& ctx, std::uint64_t) {
  Tally t;
  const auto s = ScalarSummaries::from_moments(1.0, 0.25, 0.1, 0.8);
  for (double gamma : ctx.gammas()) {
    const LimitSpec spec(gamma, s);
    for (double lambda : ctx.lambdas()) {
      t.expect(*limiting_ridge(spec, lambda, Target::Causal).variance ==
                   *limiting_ridge(spec, lambda, Target::Statistical).variance,
               "ridge gamma=" + num(gamma) + " lambda=" + num(lambda));
    }
    t.expect(*limiting_min_norm(spec, Target::Causal).variance ==
                 *limiting_min_norm(spec, Target::Statistical).variance,
             "min-norm gamma=" + num(gamma));
  }
  return t.finish("asymptotics.variance_coincidence");
}

CheckResult asymptotics_double_descent(const Context&, std::uint64_t) {
  Tally t;
  const auto s = ScalarSummaries::from_moments(1.0, 0.0, 0.0, 1.0);
  auto variance = [&](double gamma) {
    return *limiting_min_norm(LimitSpec(gamma, s), Target::Causal).variance;
  };
  const std::vector<double> under{0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  const std::vector<double> over{1.01, 1.1, 1.5, 2, 3, 10, 100};
  for (std::size_t i = 1; i < under.size(); ++i) {
    t.expect(variance(under[i]) > variance(under[i - 1]), "not increasing at " + num(under[i]));
  }
  for (std::size_t i = 1; i < over.size(); ++i) {
    t.expect(variance(over[i]) < variance(over[i - 1]), "not decreasing at " + num(over[i]));
  }
  t.expect(variance(0.99) > 10 * variance(0.5), "V(0.99) <= 10 V(0.5)");
  t.expect(variance(1.01) > 10 * variance(0.5), "V(1.01) <= 10 V(0.5)");
  return t.finish("asymptotics.double_descent");
}

CheckResult asymptotics_reduction(const Context& ctx, std::uint64_t) {
  Tally t;
  const auto s = ScalarSummaries::from_moments(1.3, 0.0, 0.0, 0.6);
  for (double gamma : ctx.gammas()) {
    const LimitSpec spec(gamma, s);
    for (double lambda : ctx.lambdas()) {
      const auto c = limiting_ridge(spec, lambda, Target::Causal);
      const auto st = limiting_ridge(spec, lambda, Target::Statistical);
      t.expect(*c.bias == *st.bias && *c.variance == *st.variance,
               "gamma=" + num(gamma) + " lambda=" + num(lambda));
    }
  }
  return t.finish("asymptotics.unconfounded_reduction");
}

CheckResult asymptotics_ordering(const Context& ctx, std::uint64_t) {
  Tally t;
  const std::vector<double> zetas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (double gamma : ctx.gammas()) {
    for (double lambda : ctx.lambdas()) {
      for (std::size_t i = 1; i < zetas.size(); ++i) {
        const auto weaker = ScalarSummaries::from_confounding(1.0, zetas[i - 1], 0.0, 1.0);
        const auto stronger = ScalarSummaries::from_confounding(1.0, zetas[i], 0.0, 1.0);
        const double lo = limiting_ridge(LimitSpec(gamma, weaker), lambda, Target::Causal).total;
        const double hi = limiting_ridge(LimitSpec(gamma, stronger), lambda, Target::Causal).total;
        t.expect(hi > lo, "gamma=" + num(gamma) + " lambda=" + num(lambda) +
                              " zeta=" + num(zetas[i]));
      }
    }
  }
  return t.finish("asymptotics.confounding_ordering");
}

CheckResult asymptotics_ridgeless(const Context&, std::uint64_t) {
  Tally t;
  const auto s = ScalarSummaries::from_moments(1.0, 0.25, 0.0, 1.0);
  const double lambda = 1e-6;
  for (double gamma : {0.5, 2.0}) {
    const LimitSpec spec(gamma, s);
    for (Target target : {Target::Causal, Target::Statistical}) {
      const auto ridge = limiting_ridge(spec, lambda, target);
      const auto mn = limiting_min_norm(spec, target);
      const std::string where = std::string(to_string(target)) + " gamma=" + num(gamma);
      // A zero limiting bias is approached at rate lambda^2, so relative error
      // is measured against max(|bias|, lambda).
      t.expect_within(std::abs(*ridge.bias - *mn.bias), 1e-3 * std::max(std::abs(*mn.bias), lambda),
                      where + " bias");
      t.expect_within(std::abs(*ridge.variance - *mn.variance), 1e-3 * *mn.variance,
                      where + " variance");
    }
  }
  return t.finish("asymptotics.ridgeless_limit");
}

// --- confounding ----------------------------------------------------------------

CheckResult confounding_partition(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  const int trials = ctx.options.quick ? 50 : 300;
  for (int k = 0; k < trials; ++k) {
    const Vector beta = random_vector(rng, 5);
    const Vector gamma = (0.2 + 2 * rng.uniform()) * random_vector(rng, 5);
    const Vector beta_stat = beta + gamma;
    const auto s = ScalarSummaries::from_moments(beta.squaredNorm(), gamma.squaredNorm(),
                                                 gamma.dot(beta), 1.0);
    const double zeta = confounding_strength(s);
    const double causal_signal = beta.dot(beta_stat);
    t.expect((zeta >= 1) == (causal_signal <= 0), "zeta >= 1 vs <beta, beta_stat> <= 0");
    t.expect((zeta <= 0) == (causal_signal >= beta_stat.squaredNorm()),
             "zeta <= 0 vs <beta, beta_stat> >= |beta_stat|^2");
  }
  return t.finish("confounding.zeta_partition");
}

CheckResult confounding_identities(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  for (int k = 0; k < 50; ++k) {
    const Index d = 3;
    const CausalModelParams params(random_matrix(rng, d, d + 1), random_vector(rng, d + 1),
                                   random_vector(rng, d), 0.3 + rng.uniform());
    const auto s = summarize(derive_statistical(params), params.beta());
    const double scale = 1 + s.snr_stat * (1 + std::abs(s.zeta));
    t.expect_within(std::abs(s.s_min_norm - (1 - 2 * s.zeta) * s.snr_stat), 1e-12 * scale,
                    "S = (1 - 2 zeta) snr_stat");
    t.expect_within(std::abs(s.snr_caus - (1 - s.zeta) * s.snr_stat), 1e-12 * scale,
                    "snr_caus = (1 - zeta) snr_stat");
    if (std::abs(s.eta) < 1e-300) continue;
    const auto orth = ScalarSummaries::from_moments(s.r_sq, s.omega_sq, 0.0, 1.0);
    t.expect_within(std::abs(structural_confounding(orth) - confounding_strength(orth)), 1e-12,
                    "eta = 0: structural = zeta");
  }
  return t.finish("confounding.snr_identities");
}

CheckResult confounding_regime_semantics(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double zeta : {0.6, 0.8, 1.2, 2.0}) {
    for (double snr : ctx.snrs()) {
      const auto s = swept(zeta, snr);
      t.expect(min_norm_regime(s) == MinNormRegime::NeverBeatsNull, "regime label");
      for (double gamma : kGammaGrid) {
        if (std::abs(gamma - 1) < 0.05) continue;
        const LimitSpec spec(gamma, s);
        t.expect(limiting_min_norm(spec, Target::Causal).total > null_risk(spec, Target::Causal).total,
                 "zeta=" + num(zeta) + " gamma=" + num(gamma));
      }
    }
  }
  return t.finish("confounding.regime_semantics");
}

// --- optimal regularization ------------------------------------------------------

std::vector<double> dense_lambdas() {
  std::vector<double> out{1e-8, 1e-6, 1e-4, 1e-3};
  out.insert(out.end(), kLambdaGrid.begin(), kLambdaGrid.end());
  out.insert(out.end(), {1e2, 1e3, 1e4});
  return out;
}

CheckResult optimal_regime_consistency(const Context& ctx, std::uint64_t) {
  Tally t;
  const auto lambdas = dense_lambdas();
  for (double snr : ctx.snrs()) {
    for (double gamma : ctx.gammas()) {
      const double rho = rho_threshold(gamma, snr);
      std::vector<double> zetas{0.0, 0.5, 0.95, 1.0, 1.05, 2.0, -5.0};
      if (std::isfinite(rho)) {
        const double gap = 0.01 + 0.1 * std::abs(rho);
        zetas.push_back(rho - gap);
        zetas.push_back(rho + gap);
        zetas.push_back(rho);
      }
      for (double zeta : zetas) {
        const LimitSpec spec(gamma, swept(zeta, snr));
        const OptimalLambda opt = optimal_lambda_caus(spec);
        bool nondecreasing = true;
        bool nonincreasing = true;
        for (double lambda : lambdas) {
          const double deriv = ctx.derivative(lambda, spec);
          if (deriv < -1e-10) nondecreasing = false;
          if (deriv > 1e-10) nonincreasing = false;
        }
        const std::string where = "snr=" + num(snr) + " gamma=" + num(gamma) + " zeta=" + num(zeta);
        const bool zero = opt.regime == LambdaRegime::Zero;
        const bool infinite = opt.regime == LambdaRegime::Infinite;
        t.expect(zero == (gamma != 1.0 && spec.summaries().zeta <= rho), where + " Zero vs rho");
        t.expect(zero == nondecreasing, where + " Zero vs derivative sign");
        t.expect(infinite == (spec.summaries().zeta >= 1), where + " Infinite vs zeta >= 1");
        t.expect(infinite == nonincreasing, where + " Infinite vs derivative sign");
      }
    }
  }
  return t.finish("optimal_reg.regime_derivative_consistency");
}

CheckResult optimal_interior_residual(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : ctx.gammas()) {
      for (double zeta : kZetaGrid) {
        const LimitSpec spec(gamma, swept(zeta, snr));
        const OptimalLambda opt = optimal_lambda_caus(spec);
        if (opt.regime != LambdaRegime::Interior) continue;
        const double lambda = ctx.perturbed("lambda_c", opt.value);
        const double phi = mp_phi(lambda, gamma);
        const double scale = 2 * spec.summaries().s_sq / (phi * std::sqrt(phi));
        t.expect_within(std::abs(risk_derivative(lambda, spec)), 1e-8 * scale,
                        "snr=" + num(snr) + " gamma=" + num(gamma) + " zeta=" + num(zeta));
      }
    }
  }
  return t.finish("optimal_reg.interior_residual");
}

CheckResult optimal_derivative_fd(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double zeta : {-0.5, 0.0, 0.3, 0.9, 1.5}) {
    const LimitSpec base(1.0, swept(zeta, 1.0));
    for (double gamma : ctx.gammas()) {
      const LimitSpec spec(gamma, base.summaries());
      for (double lambda : ctx.lambdas()) {
        const double fd = oracle::central_difference(
            [&](double l) { return limiting_ridge(spec, l, Target::Causal).total; }, lambda, 1e-5);
        const double analytic = ctx.derivative(lambda, spec);
        t.expect_within(std::abs(fd - analytic), 1e-5 * std::abs(analytic) + 1e-9,
                        "zeta=" + num(zeta) + " gamma=" + num(gamma) + " lambda=" + num(lambda));
      }
    }
  }
  return t.finish("optimal_reg.risk_derivative_finite_difference");
}

CheckResult optimal_monotonicity(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : {0.3, 0.5, 1.5, 3.0}) {
      double previous = -1;
      for (double zeta : kZetaGrid) {
        const OptimalLambda opt = optimal_lambda_caus(LimitSpec(gamma, swept(zeta, snr)));
        if (opt.regime != LambdaRegime::Interior) continue;
        if (previous >= 0) {
          t.expect(opt.value > previous,
                   "snr=" + num(snr) + " gamma=" + num(gamma) + " zeta=" + num(zeta));
        }
        previous = opt.value;
      }
    }
  }
  return t.finish("optimal_reg.monotonicity");
}

CheckResult optimal_phase_transition(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : kGammaGrid) {
      for (double zeta : kZetaGrid) {
        const LimitSpec spec(gamma, swept(zeta, snr));
        if (optimal_lambda_caus(spec).regime != LambdaRegime::Interior) continue;
        const auto order = compare_regularization(spec);
        const auto expected = zeta < 0   ? RegularizationOrder::CausalLess
                              : zeta > 0 ? RegularizationOrder::CausalMore
                                         : RegularizationOrder::Equal;
        t.expect(order == expected,
                 "snr=" + num(snr) + " gamma=" + num(gamma) + " zeta=" + num(zeta));
      }
    }
  }
  return t.finish("optimal_reg.phase_transition");
}

CheckResult optimal_threshold_curve(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : kGammaGrid) {
      const std::string where = "snr=" + num(snr) + " gamma=" + num(gamma);
      double previous = -INFINITY;
      for (double lambda = 1e-6; lambda < 1e4; lambda *= 1.5) {
        const double fd = oracle::central_difference(
            [&](double l) { return zeta_threshold(l, gamma, snr); }, lambda, 1e-3 * lambda);
        t.expect(fd >= -1e-10, where + " f decreasing at lambda=" + num(lambda));
        const double f = zeta_threshold(lambda, gamma, snr);
        t.expect(f >= previous, where + " f not monotone on grid");
        previous = f;
      }
      t.expect_within(std::abs(zeta_threshold(1e6, gamma, snr) - 1), 1e-3, where + " f(inf)");
      if (gamma != 1.0) {
        const double limit = gamma < 1 ? -gamma / (snr * (gamma - 1) * (gamma - 1))
                                       : -gamma * gamma / (snr * (gamma - 1) * (gamma - 1));
        t.expect_within(std::abs(zeta_threshold(1e-8, gamma, snr) - limit),
                        1e-3 * std::max(1.0, std::abs(limit)), where + " f(0+)");
        t.expect_within(std::abs(rho_threshold(gamma, snr) - limit), 1e-12 * std::abs(limit),
                        where + " rho = f(0)");
      }
    }
  }
  return t.finish("optimal_reg.zeta_threshold_properties");
}

CheckResult optimal_benign_boundary(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : kGammaGrid) {
      if (gamma == 1.0) continue;
      const double bound = gamma * std::max(1.0, gamma) / ((1 - gamma) * (1 - gamma));
      const double rho = -bound / snr;
      for (double rel : {-1e-3, -1e-6, 1e-6, 1e-3}) {
        const double zeta = rho + rel * (1 + std::abs(rho));
        const auto s = swept(zeta, snr);
        const bool zero = optimal_lambda_caus(LimitSpec(gamma, s)).regime == LambdaRegime::Zero;
        const bool inequality = s.snr_caus - s.snr_stat >= bound;
        t.expect(zero == inequality, "snr=" + num(snr) + " gamma=" + num(gamma) +
                                         " offset=" + num(rel));
        t.expect(zero == (rel < 0), "boundary side at gamma=" + num(gamma));
      }
    }
  }
  return t.finish("optimal_reg.benign_overfitting_boundary");
}

CheckResult optimal_benefit(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    for (double gamma : ctx.gammas()) {
      for (double zeta : {0.25, 0.5, 0.75, 0.9, 1.5}) {
        const LimitSpec spec(gamma, swept(zeta, snr));
        const double ridgeless = limiting_ridge(spec, 1e-6, Target::Causal).total;
        const double best = limiting_at(spec, optimal_lambda_caus(spec), Target::Causal).total;
        t.expect(ridgeless - best > 0,
                 "snr=" + num(snr) + " gamma=" + num(gamma) + " zeta=" + num(zeta) +
                     " margin=" + num(ridgeless - best));
      }
    }
  }
  return t.finish("optimal_reg.non_vanishing_benefit");
}

CheckResult optimal_stat_recovery(const Context& ctx, std::uint64_t) {
  Tally t;
  for (double snr : ctx.snrs()) {
    const auto s = ScalarSummaries::from_moments(snr, 0.0, 0.0, 1.0);
    for (double gamma : ctx.gammas()) {
      const LimitSpec spec(gamma, s);
      const double numeric = oracle::golden_section_minimize(
          [&](double l) { return limiting_ridge(spec, l, Target::Statistical).total; }, 1e-9,
          100.0);
      const double closed = optimal_lambda_stat(gamma, snr);
      t.expect_within(std::abs(numeric - closed), 1e-4,
                      "snr=" + num(snr) + " gamma=" + num(gamma));
    }
  }
  return t.finish("optimal_reg.lambda_stat_recovery");
}

CheckResult optimal_small_gamma(const Context&, std::uint64_t) {
  Tally t;
  for (double zeta : {0.25, 0.5, 0.75}) {
    for (double snr : {0.5, 1.0, 4.0}) {
      const OptimalLambda opt = optimal_lambda_caus(LimitSpec(1e-8, swept(zeta, snr)));
      t.expect_within(std::abs(opt.value - zeta / (1 - zeta)), 1e-3,
                      "zeta=" + num(zeta) + " snr=" + num(snr));
    }
  }
  return t.finish("optimal_reg.small_gamma_limit");
}

// --- harness ----------------------------------------------------------------------

CheckResult harness_csv_precision(const Context& ctx, std::uint64_t index) {
  Tally t;
  Rng rng(ctx.seed(index));
  for (int k = 0; k < 200; ++k) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.bits() % 80) - 40);
    t.expect(std::stod(format_double(v)) == v, "round trip of " + format_double(v));
  }
  return t.finish("harness.float_round_trip");
}

CheckResult harness_sampling_determinism(const Context& ctx, std::uint64_t index) {
  Tally t;
  const auto params = build_isotropic_model(Vector::Ones(6), 1.0, 0.3, 0.0);
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto seed = substream_seed(ctx.options.seed, index, k);
    const auto a = sample_observational(params, 50, seed);
    const auto b = sample_observational(params, 50, seed);
    t.expect(a.x == b.x && a.y == b.y, "observational seed reuse");
    const auto c = sample_interventional(params, 50, seed);
    const auto e = sample_interventional(params, 50, seed);
    t.expect(c.x == e.x && c.y == e.y, "interventional seed reuse");
  }
  return t.finish("harness.sampling_determinism");
}

using CheckFn = CheckResult (*)(const Context&, std::uint64_t);

struct NamedCheck {
  const char* name;
  CheckFn fn;
};

const std::vector<NamedCheck> kChecks{
    {"model.round_trip", model_round_trip},
    {"model.noise_nonnegative", model_noise_nonnegative},
    {"model.summary_identities", model_summary_identities},
    {"model.observational_conditional", model_observational_conditional},
    {"model.interventional_conditional", model_interventional_conditional},
    {"estimators.ridgeless_consistency", estimators_ridgeless},
    {"estimators.interpolation", estimators_interpolation},
    {"estimators.decomposition_consistency", estimators_decomposition},
    {"estimators.variance_target_independence", estimators_variance_independence},
    {"asymptotics.mp_fixed_point", asymptotics_fixed_point},
    {"asymptotics.mp_m_prime_finite_difference", asymptotics_m_prime},
    {"asymptotics.variance_coincidence", asymptotics_variance_coincidence},
    {"asymptotics.double_descent", asymptotics_double_descent},
    {"asymptotics.unconfounded_reduction", asymptotics_reduction},
    {"asymptotics.confounding_ordering", asymptotics_ordering},
    {"asymptotics.ridgeless_limit", asymptotics_ridgeless},
    {"confounding.zeta_partition", confounding_partition},
    {"confounding.snr_identities", confounding_identities},
    {"confounding.regime_semantics", confounding_regime_semantics},
    {"optimal_reg.regime_derivative_consistency", optimal_regime_consistency},
    {"optimal_reg.interior_residual", optimal_interior_residual},
    {"optimal_reg.risk_derivative_finite_difference", optimal_derivative_fd},
    {"optimal_reg.monotonicity", optimal_monotonicity},
    {"optimal_reg.phase_transition", optimal_phase_transition},
    {"optimal_reg.zeta_threshold_properties", optimal_threshold_curve},
    {"optimal_reg.benign_overfitting_boundary", optimal_benign_boundary},
    {"optimal_reg.non_vanishing_benefit", optimal_benefit},
    {"optimal_reg.lambda_stat_recovery", optimal_stat_recovery},
    {"optimal_reg.small_gamma_limit", optimal_small_gamma},
    {"harness.float_round_trip", harness_csv_precision},
    {"harness.sampling_determinism", harness_sampling_determinism},
};

const std::vector<std::string> kPerturbable{"m", "m_prime", "risk_derivative", "lambda_c"};

}  // namespace

bool CheckReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::vector<std::string> CheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : results)
    if (!r.passed) out.push_back(r.name);
  return out;
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : results) {
    checks.push_back(
        {{"name", r.name}, {"passed", r.passed}, {"cases", r.cases}, {"detail", r.detail}});
  }
  return {{"seed", seed},
          {"quick", quick},
          {"passed", all_passed()},
          {"failed", failures()},
          {"checks", checks}};
}

CheckReport run_checks(const CheckOptions& options) {
  if (options.perturb &&
      std::find(kPerturbable.begin(), kPerturbable.end(), options.perturb->name) ==
          kPerturbable.end()) {
    throw std::invalid_argument("unknown perturbation '" + options.perturb->name + "'");
  }
  const Context ctx{options};
  CheckReport report;
  report.seed = options.seed;
  report.quick = options.quick;
  report.results.resize(kChecks.size());
  parallel_for(kChecks.size(), [&](std::size_t i) {
    try {
      report.results[i] = kChecks[i].fn(ctx, i);
    } catch (const std::exception& e) {
      report.results[i].passed = false;
      report.results[i].detail = std::string("exception: ") + e.what();
    }
    report.results[i].name = kChecks[i].name;
  });
  return report;
}

}  // namespace cridge::harness
