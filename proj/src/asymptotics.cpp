#include "cridge/asymptotics.hpp"

#include <cmath>

namespace cridge {

namespace {

void require_positive(double lambda, double gamma) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
}

RiskReport assemble(double bias, double variance, double constant) {
  RiskReport r;
  r.bias = bias;
  r.variance = variance;
  r.constant = constant;
  r.total = bias + variance + constant;
  r.provenance = Provenance::Limiting;
  return r;
}

double constant_term(const ScalarSummaries& s, Target target) {
  return target == Target::Causal ? s.sigma_stat_sq + s.omega_sq : s.sigma_stat_sq;
}

}  // namespace

LimitSpec::LimitSpec(double gamma, ScalarSummaries summaries)
    : gamma_(gamma), summaries_(summaries) {
  if (!(gamma_ > 0) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("gamma must be positive and finite");
  }
  if (!(summaries_.sigma_stat_sq > 0)) {
    throw std::invalid_argument("sigma_stat_sq must be positive");
  }
}

double mp_phi(double lambda, double gamma) {
  // Factored as (lambda + (1 - sqrt g)^2)(lambda + (1 + sqrt g)^2); the expanded
  // (1 + lambda + gamma)^2 - 4 gamma cancels badly for small lambda near gamma = 1.
  const double root_gamma = std::sqrt(gamma);
  const double lower = (1 - gamma) / (1 + root_gamma);
  return (lambda + lower * lower) * (lambda + (1 + root_gamma) * (1 + root_gamma));
}

double mp_m(double lambda, double gamma) {
  require_positive(lambda, gamma);
  const double b = 1 - gamma + lambda;
  const double root = std::sqrt(mp_phi(lambda, gamma));
  // sqrt(phi) - b = 4 gamma lambda / (sqrt(phi) + b) avoids cancellation when b > 0.
  if (b > 0) return 2 / (root + b);
  return (root - b) / (2 * gamma * lambda);
}

double mp_m_prime(double lambda, double gamma) {
  const double m = mp_m(lambda, gamma);
  // Implicit differentiation of gamma lambda m^2 + (1 - gamma + lambda) m - 1 = 0.
  return m * (1 + gamma * m) / std::sqrt(mp_phi(lambda, gamma));
}

RiskReport limiting_ridge(const LimitSpec& spec, double lambda, Target target) {
  const double gamma = spec.gamma();
  const ScalarSummaries& s = spec.summaries();
  const double m = mp_m(lambda, gamma);
  const double mp = mp_m_prime(lambda, gamma);

  const double variance = s.sigma_stat_sq * gamma * (m - lambda * mp);
  const double shrink_sq = s.s_sq * lambda * lambda * mp;
  const double bias = target == Target::Causal
                          ? s.omega_sq + shrink_sq - 2 * (s.omega_sq + s.eta) * lambda * m
                          : shrink_sq;
  return assemble(bias, variance, constant_term(s, target));
}

RiskReport limiting_min_norm(const LimitSpec& spec, Target target) {
  const double gamma = spec.gamma();
  const ScalarSummaries& s = spec.summaries();
  if (gamma == 1.0) {
    throw ThresholdDivergenceError("min-norm risk diverges at gamma = 1");
  }
  double bias = 0;
  double variance = 0;
  if (gamma < 1) {
    bias = target == Target::Causal ? s.omega_sq : 0.0;
    variance = s.sigma_stat_sq * gamma / (1 - gamma);
  } else {
    const double frac = 1 - 1 / gamma;
    bias = target == Target::Causal ? s.omega_sq + (s.r_sq - s.omega_sq) * frac : s.s_sq * frac;
    variance = s.sigma_stat_sq / (gamma - 1);
  }
  return assemble(bias, variance, constant_term(s, target));
}

RiskReport null_risk(const LimitSpec& spec, Target target) {
  const ScalarSummaries& s = spec.summaries();
  const double bias = target == Target::Causal ? s.r_sq : s.s_sq;
  return assemble(bias, 0.0, constant_term(s, target));
}

}  // namespace cridge
