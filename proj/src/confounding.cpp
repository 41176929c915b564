#include "cridge/confounding.hpp"

namespace cridge {

double confounding_strength(const ScalarSummaries& s) {
  if (!(s.s_sq > 1e-14)) {
    throw ZeroSignalError("confounding strength undefined for zero statistical signal");
  }
  return (s.omega_sq + s.eta) / s.s_sq;
}

double structural_confounding(const ScalarSummaries& s) {
  const double total = s.omega_sq + s.r_sq;
  if (!(total > 0)) {
    throw std::domain_error("structural confounding undefined when beta = Gamma = 0");
  }
  return s.omega_sq / total;
}

MinNormRegime min_norm_regime(const ScalarSummaries& s) {
  const double strength = (1 - 2 * s.zeta) * s.snr_stat;
  if (strength > 1) return MinNormRegime::BeatsNullBothRegimes;
  if (strength >= 0) return MinNormRegime::BeatsNullUnderOnly;
  return MinNormRegime::NeverBeatsNull;
}

std::string_view to_string(MinNormRegime regime) {
  switch (regime) {
    case MinNormRegime::BeatsNullBothRegimes: return "BeatsNullBothRegimes";
    case MinNormRegime::BeatsNullUnderOnly: return "BeatsNullUnderOnly";
    case MinNormRegime::NeverBeatsNull: return "NeverBeatsNull";
  }
  return "unknown";
}

}  // namespace cridge
