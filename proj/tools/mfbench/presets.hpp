#pragma once

#include <string_view>
#include <vector>

#include "config.hpp"

namespace mfbench {

enum class Scale { desk, paper };

/// Dimension used by a scale: 100 for desk, 1000 for paper.
int scale_dim(Scale s);

/// Names accepted by expand_preset.
std::vector<std::string_view> preset_names();

/// Expands a named preset into its arms. Throws ConfigError for unknown names.
std::vector<ExperimentConfig> expand_preset(std::string_view name, Scale scale);

// Target spectra shared by the presets.
inline constexpr std::string_view kEpSpectrum = "lin:1.0,-0.01,19,0.01";               // r_A = 20, kappa = 100
inline constexpr std::string_view kUpSpectrum = "lin:1.0,-0.01,37,0.05,0.025,0.01";    // r_A = 40, kappa = 100

}  // namespace mfbench
