#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpoincare/cli/config.hpp"

namespace qpoincare::cli {

/// paper-examples, gap-laws, concentration-sweep, talagrand-sweep.
const std::vector<std::string>& preset_names();

/// Fully specified config; throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name, std::uint64_t seed = 1);

}  // namespace qpoincare::cli
