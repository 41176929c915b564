#include "cridge/model.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "cridge/linalg.hpp"
#include "cridge/rng.hpp"

namespace cridge {

namespace {

constexpr double kSignalTol = 1e-14;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Dataset sample(const CausalModelParams& p, Index n, std::uint64_t seed, DataSource source) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  const Index l = p.latent_dim();
  const double noise_sd = std::sqrt(p.sigma_sq());
  const bool intervene = source == DataSource::Interventional;

  Rng rng(seed);
  Matrix z(n, l);
  Matrix z_y = intervene ? Matrix(n, l) : Matrix();
  Vector eps(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < l; ++j) z(i, j) = rng.normal();
    if (intervene) {
      for (Index j = 0; j < l; ++j) z_y(i, j) = rng.normal();
    }
    eps(i) = noise_sd * rng.normal();
  }

  Dataset out;
  out.x = z * p.mixing().transpose();
  out.y = out.x * p.beta() + (intervene ? z_y : z) * p.alpha() + eps;
  out.source = source;
  out.seed = seed;
  return out;
}

}  // namespace

CausalModelParams::CausalModelParams(Matrix mixing, Vector alpha, Vector beta, double sigma_sq)
    : mixing_(std::move(mixing)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      sigma_sq_(sigma_sq) {
  if (mixing_.rows() < 1) throw std::invalid_argument("model dimension d must be positive");
  if (mixing_.cols() < mixing_.rows()) {
    throw std::invalid_argument("latent dimension l must be >= d");
  }
  if (alpha_.size() != mixing_.cols()) {
    throw std::invalid_argument("alpha length must equal latent dimension l");
  }
  if (beta_.size() != mixing_.rows()) throw std::invalid_argument("beta length must equal d");
  if (!(sigma_sq_ > 0) || !std::isfinite(sigma_sq_)) {
    throw std::invalid_argument("sigma_sq must be positive and finite");
  }
  if (!mixing_.allFinite() || !alpha_.allFinite() || !beta_.allFinite()) {
    throw std::invalid_argument("model parameters must be finite");
  }
}

DerivedStatistical derive_statistical(const CausalModelParams& params) {
  const Matrix& m = params.mixing();
  DerivedStatistical out;
  out.sigma = m * m.transpose();
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
  out.gamma = psd_pseudo_inverse(out.sigma) * (m * params.alpha());
  out.beta_stat = params.beta() + out.gamma;
  // |alpha|^2 - |Gamma|_Sigma^2 is the squared norm of alpha's component in ker M.
  const Vector kernel_part = params.alpha() - m.transpose() * out.gamma;
  out.sigma_stat_sq = params.sigma_sq() + kernel_part.squaredNorm();
  if (!out.gamma.allFinite() || !std::isfinite(out.sigma_stat_sq)) {
    throw NonFiniteError("derive_statistical: non-finite confounding parameter");
  }
  return out;
}

ScalarSummaries ScalarSummaries::from_moments(double r_sq, double omega_sq, double eta,
                                              double sigma_stat_sq) {
  if (r_sq < 0 || omega_sq < 0) throw std::invalid_argument("r_sq and omega_sq must be >= 0");
  if (eta * eta > r_sq * omega_sq * (1 + 1e-12) + 1e-300) {
    throw InfeasibleModelError("Cauchy-Schwarz violated: eta^2 <= r_sq * omega_sq");
  }
  if (!(sigma_stat_sq > 0)) throw std::invalid_argument("sigma_stat_sq must be positive");
  ScalarSummaries s;
  s.r_sq = r_sq;
  s.omega_sq = omega_sq;
  s.eta = eta;
  s.s_sq = r_sq + omega_sq + 2 * eta;
  if (s.s_sq <= kSignalTol) {
    throw ZeroSignalError("statistical signal |beta_stat|^2 vanishes; zeta undefined");
  }
  s.sigma_stat_sq = sigma_stat_sq;
  s.zeta = (omega_sq + eta) / s.s_sq;
  s.snr_stat = s.s_sq / sigma_stat_sq;
  s.snr_caus = (r_sq + eta) / sigma_stat_sq;
  s.s_min_norm = (1 - 2 * s.zeta) * s.snr_stat;
  return s;
}

namespace {

// Rounding slack for the feasibility inequalities, scaled to the largest term.
double feasibility_tolerance(double s_sq, double zeta, double eta) {
  return 1e-12 * (1 + s_sq * (1 + std::abs(zeta) + zeta * zeta) + std::abs(eta));
}

}  // namespace

ScalarSummaries ScalarSummaries::from_confounding(double s_sq, double zeta, double eta,
                                                  double sigma_stat_sq) {
  if (!(s_sq > kSignalTol)) throw ZeroSignalError("s_sq must be positive");
  const double tol = feasibility_tolerance(s_sq, zeta, eta);
  const double omega_sq = zeta * s_sq - eta;
  if (omega_sq < -tol) {
    throw InfeasibleModelError("omega_sq = zeta * s_sq - eta must be nonnegative (got " +
                               fmt(omega_sq) + ")");
  }
  const double w = std::max(omega_sq, 0.0);
  if (zeta * zeta * s_sq > w + tol) {
    throw InfeasibleModelError("Cauchy-Schwarz violated: zeta^2 * s_sq = " +
                               fmt(zeta * zeta * s_sq) + " > omega_sq = " + fmt(w));
  }
  if (!(sigma_stat_sq > 0)) throw std::invalid_argument("sigma_stat_sq must be positive");
  ScalarSummaries s;
  s.s_sq = s_sq;
  s.zeta = zeta;
  s.eta = eta;
  s.omega_sq = w;
  s.r_sq = std::max(s_sq - w - 2 * eta, 0.0);
  s.sigma_stat_sq = sigma_stat_sq;
  s.snr_stat = s_sq / sigma_stat_sq;
  s.snr_caus = (1 - zeta) * s.snr_stat;
  s.s_min_norm = (1 - 2 * zeta) * s.snr_stat;
  return s;
}

ScalarSummaries summarize(const DerivedStatistical& derived, const Vector& beta) {
  ScalarSummaries s;
  s.s_sq = derived.beta_stat.squaredNorm();
  if (s.s_sq <= kSignalTol) {
    throw ZeroSignalError("statistical signal |beta_stat|^2 vanishes; zeta undefined");
  }
  s.r_sq = beta.squaredNorm();
  s.omega_sq = derived.gamma.squaredNorm();
  s.eta = derived.gamma.dot(beta);
  s.sigma_stat_sq = derived.sigma_stat_sq;
  s.zeta = derived.gamma.dot(derived.beta_stat) / s.s_sq;
  s.snr_stat = s.s_sq / s.sigma_stat_sq;
  s.snr_caus = beta.dot(derived.beta_stat) / s.sigma_stat_sq;
  s.s_min_norm = (1 - 2 * s.zeta) * s.snr_stat;
  return s;
}

CausalModelParams build_isotropic_model(const Vector& beta_stat, double sigma_stat_sq,
                                        double zeta, double eta) {
  const Index d = beta_stat.size();
  if (d < 1) throw std::invalid_argument("beta_stat must be non-empty");
  if (!(sigma_stat_sq > 0)) throw std::invalid_argument("sigma_stat_sq must be positive");
  const double s_sq = beta_stat.squaredNorm();
  if (!(s_sq > kSignalTol)) throw ZeroSignalError("beta_stat must be nonzero");

  const double tol = feasibility_tolerance(s_sq, zeta, eta);
  const double omega_sq = zeta * s_sq - eta;
  if (omega_sq < -tol) {
    throw InfeasibleModelError("infeasible: omega_sq = zeta * s_sq - eta = " + fmt(omega_sq) +
                               " < 0");
  }
  const double parallel_sq = zeta * zeta * s_sq;
  const double orth_sq = omega_sq - parallel_sq;
  if (orth_sq < -tol) {
    throw InfeasibleModelError("infeasible: Cauchy-Schwarz requires zeta^2 * s_sq <= omega_sq (" +
                               fmt(parallel_sq) + " > " + fmt(omega_sq) + ")");
  }
  const double b = std::sqrt(std::max(orth_sq, 0.0));

  Vector gamma = zeta * beta_stat;
  if (b > 0) {
    if (d < 2) {
      throw InfeasibleModelError(
          "infeasible: d = 1 cannot host a confounding component orthogonal to beta_stat");
    }
    const Vector unit = beta_stat / std::sqrt(s_sq);
    Vector u;
    for (Index k = 0; k < d; ++k) {
      Vector e = Vector::Unit(d, k);
      Vector r = e - unit(k) * unit;
      const double norm = r.norm();
      if (norm > 1e-8) {
        u = r / norm;
        break;
      }
    }
    gamma += b * u;
  }
  Vector beta = beta_stat - gamma;
  return CausalModelParams(Matrix::Identity(d, d), gamma, std::move(beta), sigma_stat_sq);
}

Dataset sample_observational(const CausalModelParams& params, Index n, std::uint64_t seed) {
  return sample(params, n, seed, DataSource::Observational);
}

Dataset sample_interventional(const CausalModelParams& params, Index n, std::uint64_t seed) {
  return sample(params, n, seed, DataSource::Interventional);
}

void write_csv(const Dataset& data, std::ostream& out) {
  for (Index j = 0; j < data.dim(); ++j) out << "x_" << (j + 1) << ',';
  out << "y\n";
  char buf[32];
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.x(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.y(i));
    out << buf << '\n';
  }
}

}  // namespace cridge
