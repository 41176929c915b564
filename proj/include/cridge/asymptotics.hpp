#pragma once

#include "cridge/common.hpp"
#include "cridge/estimators.hpp"
#include "cridge/model.hpp"

namespace cridge {

/// Overparameterization ratio gamma = lim d/n together with the model summaries.
class LimitSpec {
 public:
  LimitSpec(double gamma, ScalarSummaries summaries);

  double gamma() const { return gamma_; }
  const ScalarSummaries& summaries() const { return summaries_; }

 private:
  double gamma_;
  ScalarSummaries summaries_;
};

/// phi(lambda) = (1 + lambda + gamma)^2 - 4 gamma.
double mp_phi(double lambda, double gamma);

/// Marchenko-Pastur Stieltjes transform m(-lambda), lambda > 0.
double mp_m(double lambda, double gamma);

/// m'(-lambda) = -d/dlambda m(-lambda) > 0.
double mp_m_prime(double lambda, double gamma);

/// Limiting bias/variance/risk of ridge at lambda > 0.
RiskReport limiting_ridge(const LimitSpec& spec, double lambda, Target target);

/// Piecewise ridgeless limit. Throws ThresholdDivergenceError at gamma = 1.
RiskReport limiting_min_norm(const LimitSpec& spec, Target target);

/// Risk of the zero predictor: excess r^2 (causal) or s^2 (statistical).
RiskReport null_risk(const LimitSpec& spec, Target target);

}  // namespace cridge
