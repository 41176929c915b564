#include "cridge/harness/commands.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "cridge/confounding.hpp"
#include "cridge/harness/csv.hpp"
#include "cridge/harness/parallel.hpp"
#include "cridge/rng.hpp"

namespace cridge::harness {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& dir, const char* name, fs::path& path) {
  fs::create_directories(dir);
  path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<double> to_std(const Vector& v) { return {v.begin(), v.end()}; }

std::string_view zeta_regime(double zeta) {
  if (zeta >= 1) return "adversarial";
  if (zeta > 0) return "partial";
  return "causal_dominant";
}

Figure3Row::Stat mean_and_error(const std::vector<double>& xs) {
  Figure3Row::Stat s;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= n;
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1) / n);
  }
  return s;
}

}  // namespace

json to_json(const OptimalLambda& opt) {
  json j;
  if (opt.is_infinite()) j["value"] = "inf";
  else j["value"] = opt.value;
  j["regime"] = std::string(to_string(opt.regime));
  if (opt.residual) j["residual"] = *opt.residual;
  else j["residual"] = nullptr;
  j["derivative_positive_at_zero"] = opt.derivative_positive_at_zero;
  return j;
}

json cmd_derive(const ExperimentConfig& config) {
  const CausalModelParams params = config.model.build();
  const DerivedStatistical derived = derive_statistical(params);
  const ScalarSummaries s = summarize(derived, params.beta());

  json out;
  out["model"] = config.model.to_json();
  out["derived"] = {
      {"d", params.dim()},
      {"sigma_trace", derived.sigma.trace()},
      {"beta", to_std(params.beta())},
      {"gamma", to_std(derived.gamma)},
      {"beta_stat", to_std(derived.beta_stat)},
      {"sigma_sq", params.sigma_sq()},
      {"sigma_stat_sq", derived.sigma_stat_sq},
  };
  out["summaries"] = {
      {"r_sq", s.r_sq},
      {"omega_sq", s.omega_sq},
      {"eta", s.eta},
      {"s_sq", s.s_sq},
      {"sigma_stat_sq", s.sigma_stat_sq},
      {"zeta", s.zeta},
      {"zeta_struct", s.r_sq + s.omega_sq > 0 ? structural_confounding(s) : 0.0},
      {"snr_stat", s.snr_stat},
      {"snr_caus", s.snr_caus},
      {"s_min_norm", s.s_min_norm},
  };
  out["regimes"] = {
      {"min_norm", std::string(to_string(min_norm_regime(s)))},
      {"zeta", std::string(zeta_regime(s.zeta))},
  };
  return out;
}

fs::path cmd_simulate(const ExperimentConfig& config, const fs::path& out_dir) {
  const CausalModelParams params = config.model.build();
  const Index n = config.n ? *config.n : sample_size(params.dim(), config.gamma_grid.front());
  const Dataset data = config.source == DataSource::Observational
                           ? sample_observational(params, n, config.seed)
                           : sample_interventional(params, n, config.seed);
  fs::path path;
  auto out = open_output(out_dir, "dataset.csv", path);
  write_csv(data, out);
  return path;
}

std::vector<RiskCurveRow> risk_curve_rows(const ScalarSummaries& s,
                                          const std::vector<double>& gammas) {
  std::vector<RiskCurveRow> rows;
  for (double gamma : gammas) {
    if (gamma == 1.0) continue;
    const LimitSpec spec(gamma, s);
    const RiskReport causal = limiting_min_norm(spec, Target::Causal);
    const RiskReport stat = limiting_min_norm(spec, Target::Statistical);
    RiskCurveRow row;
    row.gamma = gamma;
    row.excess_min_norm_causal = *causal.bias + *causal.variance;
    row.excess_min_norm_statistical = *stat.bias + *stat.variance;
    row.null_excess_causal = null_risk(spec, Target::Causal).excess();
    row.omega_sq_baseline = s.omega_sq;
    row.regime = min_norm_regime(s);
    row.bias_min_norm_causal = *causal.bias;
    row.variance_min_norm = *causal.variance;
    rows.push_back(row);
  }
  return rows;
}

namespace {

const std::vector<std::string> kRiskCurveHeader{
    "gamma",          "excess_min_norm_causal", "excess_min_norm_statistical",
    "null_excess_causal", "omega_sq_baseline",  "regime_S",
    "bias_min_norm_causal", "variance_min_norm"};

std::vector<CsvCell> risk_curve_cells(const RiskCurveRow& r) {
  return {r.gamma,
          r.excess_min_norm_causal,
          r.excess_min_norm_statistical,
          r.null_excess_causal,
          r.omega_sq_baseline,
          std::string(to_string(r.regime)),
          r.bias_min_norm_causal,
          r.variance_min_norm};
}

}  // namespace

fs::path cmd_risk_curve(const ExperimentConfig& config, const fs::path& out_dir) {
  const auto params = config.model.build();
  const ScalarSummaries s = summarize(derive_statistical(params), params.beta());
  fs::path path;
  auto out = open_output(out_dir, "risk_curve.csv", path);
  CsvWriter csv(out, kRiskCurveHeader);
  for (const auto& row : risk_curve_rows(s, config.gamma_grid)) csv.row(risk_curve_cells(row));
  return path;
}

fs::path cmd_figure2(const ExperimentConfig& config, const fs::path& out_dir) {
  const ModelSpec& m = config.model;
  fs::path path;
  auto out = open_output(out_dir, "figure2.csv", path);
  std::vector<std::string> header{"zeta", "eta", "S"};
  header.insert(header.end(), kRiskCurveHeader.begin(), kRiskCurveHeader.end());
  CsvWriter csv(out, header);
  for (double zeta : config.figure2_zetas) {
    const double eta = sweep_alignment(zeta, m.norm_sq);
    const auto s = ScalarSummaries::from_confounding(m.norm_sq, zeta, eta, m.sigma_stat_sq);
    for (const auto& row : risk_curve_rows(s, config.gamma_grid)) {
      std::vector<CsvCell> cells{zeta, eta, s.s_min_norm};
      auto rest = risk_curve_cells(row);
      cells.insert(cells.end(), rest.begin(), rest.end());
      csv.row(cells);
    }
  }
  return path;
}

std::vector<Figure3Row> figure3_rows(const ExperimentConfig& config) {
  const CausalModelParams params = config.model.build(config.d);
  const DerivedStatistical derived = derive_statistical(params);
  const ScalarSummaries s = summarize(derived, params.beta());
  const Vector& beta = params.beta();
  const auto reps = static_cast<std::size_t>(config.replicates);

  std::vector<Figure3Row> rows;
  for (std::size_t cell = 0; cell < config.gamma_grid.size(); ++cell) {
    const double gamma = config.gamma_grid[cell];
    if (gamma == 1.0) continue;
    Figure3Row row;
    row.gamma = gamma;
    row.n = sample_size(config.d, gamma);
    const LimitSpec spec(gamma, s);
    row.lambda_c = optimal_lambda_caus(spec);
    row.limit_min_norm = limiting_min_norm(spec, Target::Causal);
    row.limit_ridge = limiting_at(spec, row.lambda_c, Target::Causal);
    row.limit_variance_min_norm_stat = *limiting_min_norm(spec, Target::Statistical).variance;
    row.limit_variance_ridge_stat = *limiting_at(spec, row.lambda_c, Target::Statistical).variance;

    // Per replicate: {bias_mn, var_mn, bias_r, var_r} for causal then statistical.
    std::vector<std::array<double, 8>> out(reps);
    parallel_for(reps, [&](std::size_t r) {
      const auto seed = substream_seed(config.seed, cell, r);
      const DesignSpectrum design(sample_observational(params, row.n, seed).x);
      for (int t = 0; t < 2; ++t) {
        const Target target = t == 0 ? Target::Causal : Target::Statistical;
        const BiasVariance mn = design.bias_variance(derived, beta, 0.0, target);
        BiasVariance ridge;
        switch (row.lambda_c.regime) {
          case LambdaRegime::Zero: ridge = mn; break;
          case LambdaRegime::Interior:
            ridge = design.bias_variance(derived, beta, row.lambda_c.value, target);
            break;
          case LambdaRegime::Infinite:
            ridge.bias = target == Target::Causal ? beta.dot(derived.sigma * beta)
                                                  : derived.beta_stat.dot(derived.sigma *
                                                                          derived.beta_stat);
            ridge.variance = 0;
            break;
        }
        out[r][4 * t + 0] = mn.bias;
        out[r][4 * t + 1] = mn.variance;
        out[r][4 * t + 2] = ridge.bias;
        out[r][4 * t + 3] = ridge.variance;
      }
    });
    auto column = [&](int k) {
      std::vector<double> xs(reps);
      for (std::size_t r = 0; r < reps; ++r) xs[r] = out[r][k];
      return mean_and_error(xs);
    };
    row.bias_min_norm = column(0);
    row.variance_min_norm = column(1);
    row.bias_ridge = column(2);
    row.variance_ridge = column(3);
    row.bias_min_norm_stat = column(4);
    row.variance_min_norm_stat = column(5);
    row.bias_ridge_stat = column(6);
    row.variance_ridge_stat = column(7);
    rows.push_back(row);
  }
  return rows;
}

fs::path cmd_figure3(const ExperimentConfig& config, const fs::path& out_dir) {
  fs::path path;
  auto out = open_output(out_dir, "figure3.csv", path);
  CsvWriter csv(out, {"gamma",
                      "n",
                      "lambda_c",
                      "lambda_c_regime",
                      "limit_bias_min_norm",
                      "limit_variance_min_norm",
                      "limit_excess_min_norm",
                      "limit_bias_ridge",
                      "limit_variance_ridge",
                      "limit_excess_ridge",
                      "limit_variance_min_norm_statistical",
                      "limit_variance_ridge_statistical",
                      "finite_bias_min_norm",
                      "finite_bias_min_norm_stderr",
                      "finite_variance_min_norm",
                      "finite_variance_min_norm_stderr",
                      "finite_bias_ridge",
                      "finite_bias_ridge_stderr",
                      "finite_variance_ridge",
                      "finite_variance_ridge_stderr",
                      "finite_bias_min_norm_statistical",
                      "finite_variance_min_norm_statistical",
                      "finite_bias_ridge_statistical",
                      "finite_variance_ridge_statistical"});
  for (const auto& r : figure3_rows(config)) {
    const std::string lambda = r.lambda_c.is_infinite() ? "inf" : format_double(r.lambda_c.value);
    csv.row({r.gamma,
             static_cast<std::int64_t>(r.n),
             lambda,
             std::string(to_string(r.lambda_c.regime)),
             *r.limit_min_norm.bias,
             *r.limit_min_norm.variance,
             r.limit_min_norm.excess(),
             *r.limit_ridge.bias,
             *r.limit_ridge.variance,
             r.limit_ridge.excess(),
             r.limit_variance_min_norm_stat,
             r.limit_variance_ridge_stat,
             r.bias_min_norm.mean,
             r.bias_min_norm.std_error,
             r.variance_min_norm.mean,
             r.variance_min_norm.std_error,
             r.bias_ridge.mean,
             r.bias_ridge.std_error,
             r.variance_ridge.mean,
             r.variance_ridge.std_error,
             r.bias_min_norm_stat.mean,
             r.variance_min_norm_stat.mean,
             r.bias_ridge_stat.mean,
             r.variance_ridge_stat.mean});
  }
  return path;
}

json optimal_lambda_table(const ExperimentConfig& config) {
  const ModelSpec& m = config.model;
  json cells = json::array();
  for (double zeta : config.zeta_grid) {
    const double eta = sweep_alignment(zeta, m.norm_sq);
    const auto s = ScalarSummaries::from_confounding(m.norm_sq, zeta, eta, m.sigma_stat_sq);
    for (double gamma : config.gamma_grid) {
      const LimitSpec spec(gamma, s);
      const double lambda_s = optimal_lambda_stat(gamma, s.snr_stat);
      const OptimalLambda lambda_c = optimal_lambda_caus(spec);
      const RegularizationOrder order = compare_regularization(spec);
      const int sign = order == RegularizationOrder::CausalMore   ? 1
                       : order == RegularizationOrder::CausalLess ? -1
                                                                  : 0;
      cells.push_back({{"gamma", gamma},
                       {"zeta", zeta},
                       {"eta", eta},
                       {"lambda_s", lambda_s},
                       {"lambda_c", to_json(lambda_c)},
                       {"sign", sign},
                       {"order", std::string(to_string(order))},
                       {"rho", std::isinf(rho_threshold(gamma, s.snr_stat))
                                   ? json("-inf")
                                   : json(rho_threshold(gamma, s.snr_stat))}});
    }
  }
  return {{"snr_stat", m.norm_sq / m.sigma_stat_sq},
          {"s_sq", m.norm_sq},
          {"sigma_stat_sq", m.sigma_stat_sq},
          {"cells", cells}};
}

fs::path cmd_optimal_lambda(const ExperimentConfig& config, const fs::path& out_dir) {
  fs::path path;
  auto out = open_output(out_dir, "optimal_lambda.json", path);
  out << optimal_lambda_table(config).dump(2) << '\n';
  return path;
}

}  // namespace cridge::harness
