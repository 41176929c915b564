#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Which test distribution a risk is measured against.
enum class Target { Causal, Statistical };

/// Relative singular-value cutoff shared by every pseudo-inverse in the library.
inline constexpr double kPinvCutoff = 1e-10;

std::string_view to_string(Target target);

/// A requested model violates a feasibility inequality.
class InfeasibleModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Confounding strength is undefined because the statistical signal vanishes.
class ZeroSignalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation produced NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Min-norm limits are evaluated exactly at the interpolation threshold.
class ThresholdDivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace cridge
