#include "cridge/optimal_reg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cridge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLowerBracket = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr int kMaxBisections = 500;

// (1 + lambda + gamma - sqrt(phi)) phi / (2 gamma), written without the subtraction.
double confounding_term(double lambda, double gamma) {
  const double x = 1 + lambda + gamma;
  const double phi = mp_phi(lambda, gamma);
  return 2 * phi / (x + std::sqrt(phi));
}

}  // namespace

std::string_view to_string(LambdaRegime regime) {
  switch (regime) {
    case LambdaRegime::Zero: return "Zero";
    case LambdaRegime::Interior: return "Interior";
    case LambdaRegime::Infinite: return "Infinite";
  }
  return "unknown";
}

std::string_view to_string(RegularizationOrder order) {
  switch (order) {
    case RegularizationOrder::CausalLess: return "CausalLess";
    case RegularizationOrder::Equal: return "Equal";
    case RegularizationOrder::CausalMore: return "CausalMore";
  }
  return "unknown";
}

double optimal_lambda_stat(double gamma, double snr_stat) {
  if (!(gamma > 0) || !(snr_stat > 0)) {
    throw std::invalid_argument("gamma and snr_stat must be positive");
  }
  return gamma / snr_stat;
}

double critical_point_function(double lambda, double gamma, double snr_stat, double zeta) {
  return lambda - gamma / snr_stat - zeta * confounding_term(lambda, gamma);
}

double risk_derivative(double lambda, const LimitSpec& spec) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  const ScalarSummaries& s = spec.summaries();
  const double gamma = spec.gamma();
  const double phi = mp_phi(lambda, gamma);
  const double scale = 2 * s.s_sq / (phi * std::sqrt(phi));
  return scale * critical_point_function(lambda, gamma, s.snr_stat, s.zeta);
}

double zeta_threshold(double lambda, double gamma, double snr_stat) {
  if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
  const double x = 1 + lambda + gamma;
  const double phi = mp_phi(lambda, gamma);
  if (phi <= 0) return -kInf;
  return (lambda - gamma / snr_stat) * (x + std::sqrt(phi)) / (2 * phi);
}

double rho_threshold(double gamma, double snr_stat) {
  if (!(gamma > 0) || !(snr_stat > 0)) {
    throw std::invalid_argument("gamma and snr_stat must be positive");
  }
  if (gamma == 1.0) return -kInf;
  const double gap = 1 - gamma;
  return -gamma * std::max(1.0, gamma) / (snr_stat * gap * gap);
}

bool derivative_positive_at_zero(const LimitSpec& spec) {
  const ScalarSummaries& s = spec.summaries();
  return critical_point_function(0.0, spec.gamma(), s.snr_stat, s.zeta) > 0;
}

OptimalLambda optimal_lambda_caus(const LimitSpec& spec) {
  const ScalarSummaries& s = spec.summaries();
  const double gamma = spec.gamma();
  const double snr = s.snr_stat;
  const double zeta = s.zeta;

  OptimalLambda out;
  out.derivative_positive_at_zero = derivative_positive_at_zero(spec);

  if (zeta >= 1) {
    out.regime = LambdaRegime::Infinite;
    out.value = kInf;
    return out;
  }
  if (gamma != 1.0 && zeta <= rho_threshold(gamma, snr)) {
    out.regime = LambdaRegime::Zero;
    out.value = 0;
    return out;
  }

  out.regime = LambdaRegime::Interior;
  if (zeta == 0) {
    out.value = optimal_lambda_stat(gamma, snr);
    out.residual = std::abs(risk_derivative(out.value, spec));
    return out;
  }

  auto g = [&](double lambda) { return critical_point_function(lambda, gamma, snr, zeta); };

  double lo = kLowerBracket;
  if (g(lo) >= 0) {
    out.value = lo;
    out.residual = std::abs(risk_derivative(lo, spec));
    return out;
  }

  // g(lambda) = (1 - zeta) lambda + O(1), so doubling terminates.
  const double start = std::max(1.0, gamma / snr);
  const double limit = 1e3 * std::max(1.0 + gamma, gamma / snr) / (1 - zeta);
  double hi = start;
  while (g(hi) <= 0) {
    lo = hi;
    hi *= 2;
    if (hi > limit) {
      throw std::logic_error("optimal_lambda_caus: bracket expansion exceeded bound; "
                             "regime classification inconsistent");
    }
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxBisections; ++it) {
    mid = 0.5 * (lo + hi);
    const double value = g(mid);
    const bool narrow = (hi - lo) < 1e-12 * (1 + mid);
    if (narrow && std::abs(value) < kResidualTol) break;
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (value > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.value = mid;
  out.residual = std::abs(risk_derivative(mid, spec));
  return out;
}

RiskReport limiting_at(const LimitSpec& spec, const OptimalLambda& opt, Target target) {
  switch (opt.regime) {
    case LambdaRegime::Zero: return limiting_min_norm(spec, target);
    case LambdaRegime::Infinite: return null_risk(spec, target);
    case LambdaRegime::Interior: break;
  }
  return limiting_ridge(spec, opt.value, target);
}

RegularizationOrder compare_regularization(const LimitSpec& spec) {
  const OptimalLambda opt = optimal_lambda_caus(spec);
  if (opt.regime == LambdaRegime::Infinite) return RegularizationOrder::CausalMore;
  if (opt.regime == LambdaRegime::Zero) return RegularizationOrder::CausalLess;
  const double stat = optimal_lambda_stat(spec.gamma(), spec.summaries().snr_stat);
  const double diff = opt.value - stat;
  if (std::abs(diff) <= 1e-10 * (1 + stat)) return RegularizationOrder::Equal;
  return diff > 0 ? RegularizationOrder::CausalMore : RegularizationOrder::CausalLess;
}

}  // namespace cridge
