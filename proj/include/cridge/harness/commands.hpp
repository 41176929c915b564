#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cridge/confounding.hpp"
#include "cridge/harness/config.hpp"
#include "cridge/optimal_reg.hpp"

namespace cridge::harness {

/// {"value": float | "inf", "regime": ..., "residual": float | null,
///  "derivative_positive_at_zero": bool}
json to_json(const OptimalLambda& opt);

/// Derived quantities, summaries and regime labels of the configured model.
json cmd_derive(const ExperimentConfig& config);

/// Samples config.n rows (observational or interventional) to dataset.csv.
std::filesystem::path cmd_simulate(const ExperimentConfig& config,
                                   const std::filesystem::path& out_dir);

struct RiskCurveRow {
  double gamma = 0;
  double excess_min_norm_causal = 0;
  double excess_min_norm_statistical = 0;
  double null_excess_causal = 0;
  double omega_sq_baseline = 0;
  MinNormRegime regime = MinNormRegime::BeatsNullBothRegimes;
  double bias_min_norm_causal = 0;
  double variance_min_norm = 0;
};

/// Limiting min-norm curve over `gammas`; gamma = 1 is skipped.
std::vector<RiskCurveRow> risk_curve_rows(const ScalarSummaries& s,
                                          const std::vector<double>& gammas);

std::filesystem::path cmd_risk_curve(const ExperimentConfig& config,
                                     const std::filesystem::path& out_dir);

/// Risk curves for each zeta in config.figure2_zetas at the model's s^2, sigma^2.
std::filesystem::path cmd_figure2(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir);

struct Figure3Row {
  double gamma = 0;
  Index n = 0;
  OptimalLambda lambda_c;

  RiskReport limit_min_norm;        // causal
  RiskReport limit_ridge;           // causal, at lambda_c
  double limit_variance_min_norm_stat = 0;
  double limit_variance_ridge_stat = 0;

  struct Stat {
    double mean = 0;
    double std_error = 0;
  };
  Stat bias_min_norm, variance_min_norm, bias_ridge, variance_ridge;
  Stat bias_min_norm_stat, variance_min_norm_stat, bias_ridge_stat, variance_ridge_stat;
};

/// Limiting versus finite-sample (d = config.d, n = round(d/gamma)) decomposition
/// for min-norm and optimally regularized ridge; gamma = 1 is skipped.
std::vector<Figure3Row> figure3_rows(const ExperimentConfig& config);

std::filesystem::path cmd_figure3(const ExperimentConfig& config,
                                  const std::filesystem::path& out_dir);

/// Optimal statistical and causal regularization over the (gamma, zeta) grid.
json optimal_lambda_table(const ExperimentConfig& config);

std::filesystem::path cmd_optimal_lambda(const ExperimentConfig& config,
                                         const std::filesystem::path& out_dir);

}  // namespace cridge::harness
