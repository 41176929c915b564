#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cridge/model.hpp"

namespace cridge::harness {

using nlohmann::json;

/// Model spec object:
///   {"d": int, "beta_stat": [..] | {"norm_sq": x, "direction": "e1"},
///    "sigma_stat_sq": x, "zeta": x, "eta": x}
struct ModelSpec {
  Index d = 0;
  std::optional<Vector> explicit_beta_stat;
  double norm_sq = 1.0;
  std::string direction = "e1";
  double sigma_stat_sq = 1.0;
  double zeta = 0.0;
  double eta = 0.0;

  static ModelSpec from_json(const json& j, Index fallback_d = 0);
  json to_json() const;

  /// beta_stat realized in dimension `dim` (the model's own d when dim = 0).
  Vector beta_stat(Index dim = 0) const;

  /// Isotropic causal model in dimension `dim`. Throws InfeasibleModelError.
  CausalModelParams build(Index dim = 0) const;

  /// Summaries implied by (s^2, zeta, eta, sigma_stat^2) without building vectors.
  ScalarSummaries summaries() const;
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<double> gamma_grid{0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2, 3, 10};
  std::vector<double> lambda_grid{0.01, 0.1, 0.5, 1, 5, 50};
  std::vector<double> zeta_grid{-3, -1, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 0.9, 1, 1.5};
  std::vector<double> figure2_zetas{-0.5, 0.25, 0.75};
  Index d = 300;
  Index replicates = 20;
  Index mc_samples = 2000;
  std::optional<Index> n;  // simulate only; defaults to round(d / gamma_grid[0])
  DataSource source = DataSource::Observational;
  std::uint64_t seed = 20211;
  std::filesystem::path outputs = "out";

  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  json to_json() const;
  void validate() const;
};

/// n = round(d / gamma), at least 2.
Index sample_size(Index d, double gamma);

/// Alignment used when sweeping zeta at fixed s^2: eta = 0 on [0, 1], otherwise
/// Gamma parallel to beta_stat (eta = zeta (1 - zeta) s^2), the only family
/// that stays feasible for every zeta.
double sweep_alignment(double zeta, double s_sq);

}  // namespace cridge::harness
