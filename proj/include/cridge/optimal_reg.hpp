#pragma once

#include <optional>
#include <string_view>

#include "cridge/asymptotics.hpp"

namespace cridge {

enum class LambdaRegime { Zero, Interior, Infinite };

std::string_view to_string(LambdaRegime regime);

/// Minimizer of the limiting causal risk over lambda in [0, inf].
struct OptimalLambda {
  double value = 0;  // +infinity in the Infinite regime
  LambdaRegime regime = LambdaRegime::Interior;
  std::optional<double> residual;  // |d/dlambda risk| at value, Interior only
  bool derivative_positive_at_zero = false;

  bool is_infinite() const { return regime == LambdaRegime::Infinite; }
};

/// gamma / SNR_stat.
double optimal_lambda_stat(double gamma, double snr_stat);

/// Sign-carrying factor of the risk derivative:
///   lambda - gamma/SNR - (zeta / 2 gamma) (1 + lambda + gamma - sqrt(phi)) phi.
double critical_point_function(double lambda, double gamma, double snr_stat, double zeta);

/// d/dlambda of the limiting causal risk = (2 s^2 / phi^{3/2}) * critical_point_function.
double risk_derivative(double lambda, const LimitSpec& spec);

/// Largest zeta for which the causal risk is nondecreasing at lambda:
///   f = 2 gamma (lambda - gamma/SNR) / ((1 + lambda + gamma - sqrt(phi)) phi).
/// Increasing in lambda, tends to 1 as lambda -> inf.
double zeta_threshold(double lambda, double gamma, double snr_stat);

/// -gamma max(1, gamma) / (SNR (1 - gamma)^2); -infinity at gamma = 1.
double rho_threshold(double gamma, double snr_stat);

/// Sign of the causal risk derivative at lambda -> 0+.
bool derivative_positive_at_zero(const LimitSpec& spec);

/// Regime classification followed by bisection on the critical point function.
/// Throws std::logic_error if the bracket cannot be closed (misclassified regime).
OptimalLambda optimal_lambda_caus(const LimitSpec& spec);

/// Limiting risk of ridge at the optimum: min-norm for Zero, null predictor for Infinite.
RiskReport limiting_at(const LimitSpec& spec, const OptimalLambda& opt, Target target);

enum class RegularizationOrder { CausalLess, Equal, CausalMore };

std::string_view to_string(RegularizationOrder order);

RegularizationOrder compare_regularization(const LimitSpec& spec);

}  // namespace cridge
