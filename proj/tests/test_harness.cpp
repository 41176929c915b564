#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cridge/harness/checks.hpp"
#include "cridge/harness/commands.hpp"
#include "cridge/harness/csv.hpp"
#include "cridge/harness/parallel.hpp"
#include "support.hpp"

using namespace cridge;
using namespace cridge::harness;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

json model_json(double zeta, double eta, double norm_sq = 1.0, double sigma = 1.0) {
  return {{"beta_stat", {{"norm_sq", norm_sq}, {"direction", "e1"}}},
          {"sigma_stat_sq", sigma},
          {"zeta", zeta},
          {"eta", eta}};
}

ExperimentConfig config_with(json model, json extra = json::object()) {
  json j = extra;
  j["model"] = std::move(model);
  if (!j.contains("d")) j["d"] = 20;
  return ExperimentConfig::from_json(j);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cridge_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto c = config_with(model_json(0.25, 0.0), {{"gamma_grid", {0.5, 2}}, {"seed", 7}});
  CHECK(c.gamma_grid == std::vector<double>{0.5, 2});
  CHECK(c.seed == 7);
  CHECK(c.model.d == 20);
  CHECK(c.lambda_grid.size() == 6);

  const auto round = ExperimentConfig::from_json(c.to_json());
  CHECK(round.to_json() == c.to_json());

  CHECK_THROWS_AS(config_with(model_json(0, 0), {{"gamma_grid", json::array()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_with(model_json(0, 0), {{"gamma_grid", {0.5, -1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_with(model_json(0, 0), {{"d", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(config_with(model_json(0, 0), {{"replicates", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(config_with(model_json(0, 0, 0.0)), std::invalid_argument);
  CHECK_THROWS(ExperimentConfig::from_json({{"model", {{"zeta", 0.1}}}}));

  SUBCASE("explicit beta_stat") {
    json m = model_json(0.0, 0.0);
    m["beta_stat"] = {3.0, 4.0};
    const auto e = config_with(m);
    CHECK(e.model.d == 2);
    CHECK(e.model.norm_sq == Approx(25.0));
    CHECK(e.model.beta_stat()(1) == 4.0);
  }
  SUBCASE("uniform direction") {
    json m = model_json(0.0, 0.0, 4.0);
    m["beta_stat"]["direction"] = "uniform";
    const Vector b = config_with(m).model.beta_stat(16);
    CHECK(b.squaredNorm() == Approx(4.0));
    CHECK(b(0) == b(15));
  }
}

TEST_CASE("sample size and sweep alignment") {
  CHECK(sample_size(300, 0.3) == 1000);
  CHECK(sample_size(300, 1.1) == 273);
  CHECK(sample_size(3, 10) == 2);
  CHECK(sweep_alignment(0.5, 1.0) == 0);
  CHECK(sweep_alignment(-3, 1.0) == -12);
  for (double zeta : {-3.0, -0.5, 0.0, 0.4, 1.0, 1.5}) {
    CHECK_NOTHROW(build_isotropic_model(Vector::Unit(5, 0), 1.0, zeta, sweep_alignment(zeta, 1.0)));
  }
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b", "c"});
  csv.row({1.5, std::int64_t{3}, std::string("x")});
  CHECK(out.str() == "a,b,c\n1.5,3,x\n");
  CHECK_THROWS_AS(csv.row({1.0}), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("derive") {
  SUBCASE("unconfounded") {
    const json out = cmd_derive(config_with(model_json(0.0, 0.0)));
    CHECK(out["summaries"]["zeta"].get<double>() == 0.0);
    CHECK(out["regimes"]["min_norm"] == "BeatsNullUnderOnly");
  }
  SUBCASE("half confounded") {
    const json out = cmd_derive(config_with(model_json(0.5, 0.0)));
    CHECK(out["summaries"]["omega_sq"].get<double>() == Approx(0.5).epsilon(1e-14));
    CHECK(out["summaries"]["snr_caus"].get<double>() == Approx(0.5).epsilon(1e-14));
    CHECK(out["derived"]["beta_stat"].size() == 20);
  }
  SUBCASE("Cauchy-Schwarz violation") {
    CHECK_THROWS_AS(cmd_derive(config_with(model_json(0.9, 0.85))), InfeasibleModelError);
  }
}

TEST_CASE("risk curve rows") {
  const std::vector<double> gammas{0.1, 0.5, 0.9, 1.0, 1.1, 2, 3, 10};
  SUBCASE("unconfounded rows coincide") {
    const auto rows = risk_curve_rows(ScalarSummaries::from_confounding(1, 0, 0, 1), gammas);
    CHECK(rows.size() == gammas.size() - 1);
    for (const auto& r : rows) CHECK(r.excess_min_norm_causal == r.excess_min_norm_statistical);
  }
  SUBCASE("never beating the null predictor") {
    const auto s = ScalarSummaries::from_confounding(1, 0.75, 0, 1);
    for (const auto& r : risk_curve_rows(s, gammas)) {
      CHECK(r.regime == MinNormRegime::NeverBeatsNull);
      CHECK(r.excess_min_norm_causal > r.null_excess_causal);
    }
  }
  SUBCASE("variance is symmetric between 0.5 and 2") {
    const auto rows = risk_curve_rows(ScalarSummaries::from_confounding(1, 0.25, 0, 1), {0.5, 2});
    CHECK(rows[0].variance_min_norm == Approx(1.0).epsilon(1e-14));
    CHECK(rows[1].variance_min_norm == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("risk curve and figure 2 files") {
  const fs::path dir = scratch("curves");
  const auto c = config_with(model_json(0.25, 0.0), {{"gamma_grid", {0.5, 1, 2}}});
  const auto path = cmd_risk_curve(c, dir);
  std::istringstream in(slurp(path));
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("gamma,excess_min_norm_causal,excess_min_norm_statistical,null_excess_causal,"
                     "omega_sq_baseline,regime_S",
                     0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto fig2 = slurp(cmd_figure2(c, dir));
  CHECK(fig2.find("zeta") != std::string::npos);
  CHECK(std::count(fig2.begin(), fig2.end(), '\n') == 1 + 3 * 2);
}

TEST_CASE("figure 3 rows") {
  const auto c = config_with(model_json(0.2, 0.0, 1.25),
                             {{"d", 300}, {"gamma_grid", {0.5, 1.0, 2.0}}, {"replicates", 10}});
  const auto rows = figure3_rows(c);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CAPTURE(r.gamma);
    CHECK(r.n == sample_size(300, r.gamma));
    const double lb = *r.limit_min_norm.bias;
    CHECK(std::abs(r.bias_min_norm.mean - lb) <= std::max(0.05 * lb, 3 * r.bias_min_norm.std_error));
    const double lr = *r.limit_ridge.bias;
    CHECK(std::abs(r.bias_ridge.mean - lr) <= std::max(0.05 * lr, 3 * r.bias_ridge.std_error));
    CHECK(r.limit_ridge.excess() <= r.limit_min_norm.excess() + 1e-9);
    CHECK(r.variance_min_norm.mean == r.variance_min_norm_stat.mean);
    CHECK(r.variance_ridge.mean == r.variance_ridge_stat.mean);
    CHECK(*r.limit_min_norm.variance == r.limit_variance_min_norm_stat);
    CHECK(*r.limit_ridge.variance == r.limit_variance_ridge_stat);
  }
}

TEST_CASE("optimal lambda table") {
  const auto c = config_with(model_json(0.25, 0.0),
                             {{"gamma_grid", {0.01, 0.5, 1, 2, 10}},
                              {"zeta_grid", {-3, -0.5, 0, 0.5, 1, 1.5}}});
  const json table = optimal_lambda_table(c);
  int cells = 0;
  for (const auto& cell : table["cells"]) {
    ++cells;
    const double zeta = cell["zeta"];
    const double gamma = cell["gamma"];
    CAPTURE(zeta);
    CAPTURE(gamma);
    if (zeta == 0) {
      CHECK(cell["lambda_c"]["value"].get<double>() == cell["lambda_s"].get<double>());
      CHECK(cell["order"] == "Equal");
    }
    if (zeta >= 1) {
      CHECK(cell["lambda_c"]["regime"] == "Infinite");
      CHECK(cell["lambda_c"]["value"] == "inf");
    }
    if (gamma == 0.01 && zeta == 0.5) {
      CHECK(cell["lambda_c"]["value"].get<double>() == Approx(1.0).epsilon(1e-2));
    }
    if (gamma == 1) CHECK(cell["rho"] == "-inf");
  }
  CHECK(cells == 30);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto c = config_with(model_json(0.25, 0.0),
                             {{"d", 40}, {"gamma_grid", {0.5, 2}}, {"replicates", 3}, {"n", 15}});
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    cmd_simulate(c, dir);
    cmd_risk_curve(c, dir);
    cmd_figure2(c, dir);
    cmd_figure3(c, dir);
    cmd_optimal_lambda(c, dir);
  }
  for (const char* name :
       {"dataset.csv", "risk_curve.csv", "figure2.csv", "figure3.csv", "optimal_lambda.json"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(!slurp(a / name).empty());
  }
}

TEST_CASE("check suite") {
  CheckOptions opts;
  opts.quick = true;
  const auto report = run_checks(opts);
  for (const auto& r : report.results) {
    CAPTURE(r.detail);
    CHECK_MESSAGE(r.passed, r.name);
  }
  CHECK(report.results.size() >= 25);
  CHECK(run_checks(opts).to_json().dump() == report.to_json().dump());

  SUBCASE("perturbations are detected") {
    const std::vector<std::pair<std::string, std::string>> expected{
        {"m", "asymptotics.mp_fixed_point"},
        {"m_prime", "asymptotics.mp_m_prime_finite_difference"},
        {"risk_derivative", "optimal_reg.risk_derivative_finite_difference"},
        {"lambda_c", "optimal_reg.interior_residual"}};
    for (const auto& [name, check] : expected) {
      CheckOptions bad = opts;
      bad.perturb = Perturbation{name, 1e-3};
      const auto failures = run_checks(bad).failures();
      CAPTURE(name);
      CHECK(std::find(failures.begin(), failures.end(), check) != failures.end());
    }
  }
  SUBCASE("unknown perturbation") {
    CheckOptions bad = opts;
    bad.perturb = Perturbation{"nonsense", 1.0};
    CHECK_THROWS_AS(run_checks(bad), std::invalid_argument);
  }
}
