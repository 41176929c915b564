#pragma once

#include <cstdint>
#include <iosfwd>

#include "cridge/common.hpp"

namespace cridge {

/// Linear confounded structural model
///
///   z ~ N(0, I_l),  eps ~ N(0, sigma_sq),  x = M z,  y = x^T beta + z^T alpha + eps.
///
/// Validated on construction (l >= d, sigma_sq > 0, finite entries) and
/// read-only afterwards.
class CausalModelParams {
 public:
  CausalModelParams(Matrix mixing, Vector alpha, Vector beta, double sigma_sq);

  const Matrix& mixing() const { return mixing_; }
  const Vector& alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }
  double sigma_sq() const { return sigma_sq_; }

  Index dim() const { return mixing_.rows(); }
  Index latent_dim() const { return mixing_.cols(); }

 private:
  Matrix mixing_;
  Vector alpha_;
  Vector beta_;
  double sigma_sq_;
};

/// Observational quantities entailed by a causal model.
struct DerivedStatistical {
  Matrix sigma;          // Cov x = M M^T
  Vector gamma;          // confounding parameter Sigma^+ M alpha
  Vector beta_stat;      // beta + gamma
  double sigma_stat_sq;  // Var(y | x)
};

/// Scalar sufficient statistics of the isotropic asymptotics.
struct ScalarSummaries {
  double r_sq = 0;           // |beta|^2
  double omega_sq = 0;       // |Gamma|^2
  double eta = 0;            // <Gamma, beta>
  double s_sq = 0;           // |beta_stat|^2
  double sigma_stat_sq = 0;  // observational noise variance
  double zeta = 0;           // confounding strength <Gamma, beta_stat> / s_sq
  double snr_stat = 0;       // s_sq / sigma_stat_sq
  double snr_caus = 0;       // <beta, beta_stat> / sigma_stat_sq
  double s_min_norm = 0;     // (1 - 2 zeta) snr_stat

  /// From (|beta|^2, |Gamma|^2, <Gamma,beta>, sigma_stat_sq). Rejects
  /// Cauchy-Schwarz violations and a vanishing statistical signal.
  static ScalarSummaries from_moments(double r_sq, double omega_sq, double eta,
                                      double sigma_stat_sq);

  /// From (|beta_stat|^2, zeta, eta, sigma_stat_sq) using omega^2 = zeta s^2 - eta.
  static ScalarSummaries from_confounding(double s_sq, double zeta, double eta,
                                          double sigma_stat_sq);
};

enum class DataSource { Observational, Interventional };

struct Dataset {
  Matrix x;  // n x d, rows are samples
  Vector y;  // n
  DataSource source = DataSource::Observational;
  std::uint64_t seed = 0;

  Index rows() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

/// Sigma, Gamma, beta_stat and sigma_stat_sq of `params`.
/// Throws NonFiniteError if the pseudo-inverse produced non-finite values.
DerivedStatistical derive_statistical(const CausalModelParams& params);

/// Throws ZeroSignalError when |beta_stat|^2 vanishes.
ScalarSummaries summarize(const DerivedStatistical& derived, const Vector& beta);

/// Isotropic model (M = I, l = d) whose statistical parameter is exactly
/// `beta_stat` and whose confounding strength and alignment are `zeta`, `eta`.
///
/// Gamma = zeta * beta_stat + b * u with b = sqrt(omega^2 - zeta^2 s^2) and u
/// the unit vector obtained by Gram-Schmidt of the first standard basis vector
/// not parallel to beta_stat. Throws InfeasibleModelError when omega^2 < 0,
/// when zeta^2 s^2 > omega^2, or when d = 1 but an orthogonal part is needed.
CausalModelParams build_isotropic_model(const Vector& beta_stat, double sigma_stat_sq,
                                        double zeta, double eta);

/// n i.i.d. rows from the observational joint law. Deterministic in `seed`.
Dataset sample_observational(const CausalModelParams& params, Index n, std::uint64_t seed);

/// n i.i.d. rows with x from the observational marginal and y drawn under do(x):
/// the confounder entering y is independent of the one that generated x.
Dataset sample_interventional(const CausalModelParams& params, Index n, std::uint64_t seed);

/// CSV with header x_1,...,x_d,y and 17 significant digits.
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace cridge
