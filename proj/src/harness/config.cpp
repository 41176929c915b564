#include "cridge/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cridge::harness {

namespace {

std::vector<double> read_grid(const json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::vector<double>>();
}

void require_grid(const std::vector<double>& grid, const char* name, bool positive) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " must be non-empty");
  for (double v : grid) {
    if (!std::isfinite(v) || (positive && !(v > 0))) {
      throw std::invalid_argument(std::string(name) + " entries must be finite" +
                                  (positive ? " and positive" : ""));
    }
  }
}

}  // namespace

ModelSpec ModelSpec::from_json(const json& j, Index fallback_d) {
  ModelSpec spec;
  spec.d = j.value("d", static_cast<Index>(fallback_d));
  const json& beta = j.at("beta_stat");
  if (beta.is_array()) {
    const auto values = beta.get<std::vector<double>>();
    spec.explicit_beta_stat = Eigen::Map<const Vector>(values.data(), values.size());
    if (j.contains("d") && spec.d != static_cast<Index>(values.size())) {
      throw std::invalid_argument("model.d does not match beta_stat length");
    }
    spec.d = static_cast<Index>(values.size());
    spec.norm_sq = spec.explicit_beta_stat->squaredNorm();
  } else {
    spec.norm_sq = beta.at("norm_sq").get<double>();
    spec.direction = beta.value("direction", std::string("e1"));
    if (spec.direction != "e1" && spec.direction != "uniform") {
      throw std::invalid_argument("beta_stat.direction must be \"e1\" or \"uniform\"");
    }
  }
  spec.sigma_stat_sq = j.at("sigma_stat_sq").get<double>();
  spec.zeta = j.at("zeta").get<double>();
  spec.eta = j.value("eta", 0.0);
  if (spec.d < 1) throw std::invalid_argument("model.d must be positive");
  if (!(spec.norm_sq > 0)) throw std::invalid_argument("beta_stat must be nonzero");
  if (!(spec.sigma_stat_sq > 0)) throw std::invalid_argument("sigma_stat_sq must be positive");
  return spec;
}

json ModelSpec::to_json() const {
  json j;
  j["d"] = d;
  if (explicit_beta_stat) {
    j["beta_stat"] = std::vector<double>(explicit_beta_stat->begin(), explicit_beta_stat->end());
  } else {
    j["beta_stat"] = {{"norm_sq", norm_sq}, {"direction", direction}};
  }
  j["sigma_stat_sq"] = sigma_stat_sq;
  j["zeta"] = zeta;
  j["eta"] = eta;
  return j;
}

Vector ModelSpec::beta_stat(Index dim) const {
  const Index n = dim == 0 ? d : dim;
  if (explicit_beta_stat) {
    if (n != explicit_beta_stat->size()) {
      throw std::invalid_argument("explicit beta_stat has dimension " +
                                  std::to_string(explicit_beta_stat->size()) + ", requested " +
                                  std::to_string(n));
    }
    return *explicit_beta_stat;
  }
  if (direction == "uniform") {
    return Vector::Constant(n, std::sqrt(norm_sq / static_cast<double>(n)));
  }
  return std::sqrt(norm_sq) * Vector::Unit(n, 0);
}

CausalModelParams ModelSpec::build(Index dim) const {
  return build_isotropic_model(beta_stat(dim), sigma_stat_sq, zeta, eta);
}

ScalarSummaries ModelSpec::summaries() const {
  return ScalarSummaries::from_confounding(norm_sq, zeta, eta, sigma_stat_sq);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.d = j.value("d", c.d);
  if (j.contains("model")) c.model = ModelSpec::from_json(j.at("model"), c.d);
  else c.model.d = c.d;
  c.gamma_grid = read_grid(j, "gamma_grid", c.gamma_grid);
  c.lambda_grid = read_grid(j, "lambda_grid", c.lambda_grid);
  c.zeta_grid = read_grid(j, "zeta_grid", c.zeta_grid);
  c.figure2_zetas = read_grid(j, "figure2_zetas", c.figure2_zetas);
  c.replicates = j.value("replicates", c.replicates);
  c.mc_samples = j.value("mc_samples", c.mc_samples);
  if (j.contains("n")) c.n = j.at("n").get<Index>();
  if (j.contains("source")) {
    const auto src = j.at("source").get<std::string>();
    if (src == "observational") c.source = DataSource::Observational;
    else if (src == "interventional") c.source = DataSource::Interventional;
    else throw std::invalid_argument("source must be observational or interventional");
  }
  c.seed = j.value("seed", c.seed);
  if (j.contains("outputs")) c.outputs = j.at("outputs").get<std::string>();
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  return from_json(json::parse(in));
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = model.to_json();
  j["gamma_grid"] = gamma_grid;
  j["lambda_grid"] = lambda_grid;
  j["zeta_grid"] = zeta_grid;
  j["figure2_zetas"] = figure2_zetas;
  j["d"] = d;
  j["replicates"] = replicates;
  j["mc_samples"] = mc_samples;
  if (n) j["n"] = *n;
  j["source"] = source == DataSource::Observational ? "observational" : "interventional";
  j["seed"] = seed;
  j["outputs"] = outputs.string();
  return j;
}

void ExperimentConfig::validate() const {
  require_grid(gamma_grid, "gamma_grid", true);
  require_grid(lambda_grid, "lambda_grid", true);
  require_grid(zeta_grid, "zeta_grid", false);
  require_grid(figure2_zetas, "figure2_zetas", false);
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (mc_samples < 2) throw std::invalid_argument("mc_samples must be >= 2");
  if (n && *n < 1) throw std::invalid_argument("n must be >= 1");
}

Index sample_size(Index d, double gamma) {
  const auto n = static_cast<Index>(std::llround(static_cast<double>(d) / gamma));
  return std::max<Index>(n, 2);
}

double sweep_alignment(double zeta, double s_sq) {
  if (zeta >= 0 && zeta <= 1) return 0.0;
  return zeta * (1 - zeta) * s_sq;
}

}  // namespace cridge::harness
