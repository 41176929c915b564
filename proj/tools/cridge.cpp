// Command-line front end: derive, simulate, figure data and the check suite.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cridge/common.hpp"
#include "cridge/harness/checks.hpp"
#include "cridge/harness/commands.hpp"
#include "cridge/harness/config.hpp"

namespace fs = std::filesystem;
using namespace cridge;
using namespace cridge::harness;

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quick = false;
  std::vector<std::string> perturb;
};

ExperimentConfig load_config(const Options& opts) {
  ExperimentConfig config =
      opts.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.out_dir.empty()) config.outputs = opts.out_dir;
  config.validate();
  return config;
}

void report_written(const fs::path& path) { std::cout << path.string() << "\n"; }

int run_check(const Options& opts, const ExperimentConfig& config) {
  CheckOptions check;
  check.seed = config.seed;
  check.quick = opts.quick;
  if (!opts.perturb.empty()) {
    check.perturb = Perturbation{opts.perturb[0], std::stod(opts.perturb[1])};
  }
  const CheckReport report = run_checks(check);

  fs::create_directories(config.outputs);
  const fs::path path = config.outputs / "check_report.json";
  std::ofstream out(path);
  out << report.to_json().dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());

  for (const auto& r : report.results) {
    std::cout << (r.passed ? "ok   " : "FAIL ") << r.name << "  (" << r.detail << ")\n";
  }
  if (report.all_passed()) {
    std::cout << "all " << report.results.size() << " checks passed; report: " << path.string()
              << "\n";
    return 0;
  }
  for (const auto& name : report.failures()) std::cerr << "failed invariant: " << name << "\n";
  return kExitFailedCheck;
}

int dispatch(const std::string& command, const Options& opts) {
  const ExperimentConfig config = load_config(opts);
  if (command == "derive") {
    std::cout << cmd_derive(config).dump(2) << "\n";
  } else if (command == "simulate") {
    report_written(cmd_simulate(config, config.outputs));
  } else if (command == "risk-curve") {
    report_written(cmd_risk_curve(config, config.outputs));
  } else if (command == "figure2") {
    report_written(cmd_figure2(config, config.outputs));
  } else if (command == "figure3") {
    report_written(cmd_figure3(config, config.outputs));
  } else if (command == "optimal-lambda") {
    report_written(cmd_optimal_lambda(config, config.outputs));
  } else if (command == "check") {
    return run_check(opts, config);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal ridge regression: limiting risks, optimal regularization and checks"};
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"derive", "Print derived statistical parameters and summaries as JSON"},
      {"simulate", "Sample a dataset to dataset.csv"},
      {"risk-curve", "Limiting min-norm risk over the gamma grid (risk_curve.csv)"},
      {"figure2", "Risk curves for several confounding strengths (figure2.csv)"},
      {"figure3", "Limiting versus finite-sample decomposition (figure3.csv)"},
      {"optimal-lambda", "Optimal statistical and causal regularization (optimal_lambda.json)"},
      {"check", "Run the invariant check suite (check_report.json)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Experiment config JSON")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "Output directory (overrides config.outputs)");
    sub->add_option("--seed", opts.seed, "Seed (overrides config.seed)");
    if (name == "check") {
      sub->add_flag("--quick", opts.quick, "Reduced grids");
      sub->add_option("--perturb", opts.perturb, "Corrupt a quantity: <name> <eps>")
          ->expected(2);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return dispatch(command, opts);
  } catch (const InfeasibleModelError& e) {
    std::cerr << "infeasible model: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
