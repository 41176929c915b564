#include "cridge/estimators.hpp"

#include <cmath>

#include "cridge/linalg.hpp"

namespace cridge {

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Exact: return "exact";
    case Provenance::Limiting: return "limiting";
    case Provenance::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

Vector ridge_fit(const Matrix& x, const Vector& y, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("ridge_fit requires lambda > 0");
  if (x.rows() != y.size()) throw std::invalid_argument("X and Y row counts differ");
  const Index d = x.cols();
  const double n = static_cast<double>(x.rows());
  Matrix gram = Matrix::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram.diagonal().array() += n * lambda;
  Eigen::LLT<Matrix> llt(gram.selfadjointView<Eigen::Lower>());
  return llt.solve(x.transpose() * y);
}

Vector ridge_fit(const Dataset& data, double lambda) { return ridge_fit(data.x, data.y, lambda); }

Vector min_norm_fit(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("X and Y row counts differ");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Vector coef = svd.matrixU().transpose() * y;
  const double cutoff = sv.size() > 0 ? kPinvCutoff * sv(0) : 0.0;
  for (Index i = 0; i < sv.size(); ++i) coef(i) = sv(i) > cutoff ? coef(i) / sv(i) : 0.0;
  return svd.matrixV() * coef;
}

Vector min_norm_fit(const Dataset& data) { return min_norm_fit(data.x, data.y); }

DesignSpectrum::DesignSpectrum(const Matrix& x) : n_(x.rows()) {
  if (n_ < 1) throw std::invalid_argument("design must have at least one row");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = kPinvCutoff * sv(0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  basis_ = svd.matrixV().leftCols(rank);
  eigenvalues_ = sv.head(rank).array().square() / static_cast<double>(n_);
}

Vector DesignSpectrum::shrink(const Vector& v, double lambda) const {
  if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
  Vector coef = basis_.transpose() * v;
  if (lambda > 0) {
    coef.array() *= eigenvalues_.array() / (eigenvalues_.array() + lambda);
  }
  return v - basis_ * coef;
}

BiasVariance DesignSpectrum::bias_variance(const DerivedStatistical& derived, const Vector& beta,
                                           double lambda, Target target) const {
  const Matrix& sigma = derived.sigma;
  // Causal: Pi beta - (I - Pi) Gamma. Statistical: Gamma = 0, beta = beta_stat.
  Vector error;
  if (target == Target::Causal) {
    const Vector& gamma = derived.gamma;
    error = shrink(beta, lambda) - (gamma - shrink(gamma, lambda));
  } else {
    error = shrink(derived.beta_stat, lambda);
  }

  Vector weights(eigenvalues_.size());
  for (Index i = 0; i < weights.size(); ++i) {
    const double e = eigenvalues_(i);
    weights(i) = lambda > 0 ? e / ((e + lambda) * (e + lambda)) : 1.0 / e;
  }
  // Tr[V W V^T Sigma] = sum_i w_i v_i^T Sigma v_i
  const Vector quad = (basis_.transpose() * sigma * basis_).diagonal();

  BiasVariance out;
  out.bias = sq_norm(error, sigma);
  out.variance = derived.sigma_stat_sq / static_cast<double>(n_) * weights.dot(quad);
  return out;
}

BiasVariance conditional_bias_variance(const Matrix& x, const DerivedStatistical& derived,
                                       const Vector& beta, double lambda, Target target) {
  return DesignSpectrum(x).bias_variance(derived, beta, lambda, target);
}

RiskReport exact_risk(const Vector& beta_hat, const DerivedStatistical& derived,
                      const Vector& beta, Target target) {
  if (beta_hat.size() != derived.beta_stat.size() || beta.size() != beta_hat.size()) {
    throw std::invalid_argument("exact_risk: dimension mismatch");
  }
  RiskReport r;
  r.provenance = Provenance::Exact;
  if (target == Target::Causal) {
    r.bias = sq_norm(beta_hat - beta, derived.sigma);
    r.constant = derived.sigma_stat_sq + sq_norm(derived.gamma, derived.sigma);
  } else {
    r.bias = sq_norm(beta_hat - derived.beta_stat, derived.sigma);
    r.constant = derived.sigma_stat_sq;
  }
  r.variance = 0.0;
  r.total = *r.bias + r.constant;
  return r;
}

RiskReport monte_carlo_risk(const Vector& beta_hat, const CausalModelParams& params,
                            Target target, Index m, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("monte_carlo_risk requires m >= 2");
  if (beta_hat.size() != params.dim()) throw std::invalid_argument("beta_hat dimension mismatch");
  const Dataset draws = target == Target::Causal ? sample_interventional(params, m, seed)
                                                 : sample_observational(params, m, seed);
  const Vector loss = (draws.x * beta_hat - draws.y).array().square();
  const double mean = loss.mean();
  const double var = (loss.array() - mean).square().sum() / static_cast<double>(m - 1);

  const DerivedStatistical derived = derive_statistical(params);
  RiskReport r;
  r.provenance = Provenance::MonteCarlo;
  r.constant = target == Target::Causal
                   ? derived.sigma_stat_sq + sq_norm(derived.gamma, derived.sigma)
                   : derived.sigma_stat_sq;
  r.total = mean;
  r.std_error = std::sqrt(var / static_cast<double>(m));
  return r;
}

}  // namespace cridge
