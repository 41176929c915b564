#pragma once

#include <cstdint>
#include <optional>

#include "cridge/common.hpp"
#include "cridge/model.hpp"

namespace cridge {

enum class Provenance { Exact, Limiting, MonteCarlo };

std::string_view to_string(Provenance provenance);

/// Risk of a predictor split into bias, variance and the irreducible constant
/// (sigma_stat^2 + |Gamma|_Sigma^2 for the causal target, sigma_stat^2 for the
/// statistical one). Monte Carlo reports carry only `total` and `std_error`.
struct RiskReport {
  std::optional<double> bias;
  std::optional<double> variance;
  double constant = 0;
  double total = 0;
  std::optional<double> std_error;
  Provenance provenance = Provenance::Exact;

  double excess() const { return total - constant; }
};

/// (X^T X + n lambda I)^{-1} X^T Y via Cholesky. Requires lambda > 0.
Vector ridge_fit(const Matrix& x, const Vector& y, double lambda);
Vector ridge_fit(const Dataset& data, double lambda);

/// (X^T X)^+ X^T Y via SVD with the library-wide cutoff.
Vector min_norm_fit(const Matrix& x, const Vector& y);
Vector min_norm_fit(const Dataset& data);

struct BiasVariance {
  double bias = 0;
  double variance = 0;
};

/// Spectral form of a fixed design: thin SVD of X, reused across lambdas and
/// targets. lambda = 0 selects the min-norm estimator.
class DesignSpectrum {
 public:
  explicit DesignSpectrum(const Matrix& x);

  Index rows() const { return n_; }
  Index dim() const { return basis_.rows(); }
  Index rank() const { return basis_.cols(); }

  /// Eigenvalues of X^T X / n on the retained subspace.
  const Vector& eigenvalues() const { return eigenvalues_; }

  /// Pi_lambda v with Pi_lambda = I - (S + lambda I)^{-1} S, S = X^T X / n;
  /// at lambda = 0, Pi_0 = I - S^+ S.
  Vector shrink(const Vector& v, double lambda) const;

  /// Exact E_{Y|X} bias and variance of the ridge (or min-norm) estimator.
  BiasVariance bias_variance(const DerivedStatistical& derived, const Vector& beta,
                             double lambda, Target target) const;

 private:
  Index n_;
  Matrix basis_;        // d x r right singular vectors
  Vector eigenvalues_;  // r
};

/// Conditional bias ||Pi beta - (I - Pi) Gamma||_Sigma^2 and variance
/// (sigma_stat^2 / n) Tr[S (S + lambda I)^{-2} Sigma]. The statistical target
/// uses Gamma = 0 and beta = beta_stat. Variance is target independent.
BiasVariance conditional_bias_variance(const Matrix& x, const DerivedStatistical& derived,
                                       const Vector& beta, double lambda, Target target);

/// Closed-form risk of a fixed linear predictor.
RiskReport exact_risk(const Vector& beta_hat, const DerivedStatistical& derived,
                      const Vector& beta, Target target);

/// Mean squared prediction error of `beta_hat` over m fresh draws from the
/// interventional (causal) or observational (statistical) distribution.
RiskReport monte_carlo_risk(const Vector& beta_hat, const CausalModelParams& params,
                            Target target, Index m, std::uint64_t seed);

}  // namespace cridge
