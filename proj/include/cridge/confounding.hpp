#pragma once

#include <string_view>

#include "cridge/model.hpp"

namespace cridge {

/// (omega^2 + eta) / s^2. Any real value. Throws ZeroSignalError if s^2 vanishes.
double confounding_strength(const ScalarSummaries& s);

/// |Gamma|^2 / (|Gamma|^2 + |beta|^2), in [0, 1].
double structural_confounding(const ScalarSummaries& s);

/// Where the min-norm interpolator can beat the null predictor, by S = (1 - 2 zeta) SNR_stat:
/// S > 1 both regimes, 0 <= S <= 1 underparameterized only, S < 0 never.
enum class MinNormRegime { BeatsNullBothRegimes, BeatsNullUnderOnly, NeverBeatsNull };

MinNormRegime min_norm_regime(const ScalarSummaries& s);

std::string_view to_string(MinNormRegime regime);

}  // namespace cridge
