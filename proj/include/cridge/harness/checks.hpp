#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cridge::harness {

/// Deliberate corruption of one quantity, used to confirm a check notices it.
/// Known names: "m", "m_prime", "risk_derivative", "lambda_c".
struct Perturbation {
  std::string name;
  double eps = 0;
};

struct CheckOptions {
  std::uint64_t seed = 20211;
  bool quick = false;
  std::optional<Perturbation> perturb;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  long cases = 0;
  std::string detail;
};

struct CheckReport {
  std::uint64_t seed = 0;
  bool quick = false;
  std::vector<CheckResult> results;

  bool all_passed() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
};

/// Every module invariant on the standard grids (a reduced grid when quick).
/// Throws std::invalid_argument for an unknown perturbation name.
CheckReport run_checks(const CheckOptions& options);

}  // namespace cridge::harness
