#pragma once

#include "lrtrunc/config.hpp"
#include "lrtrunc/kernel.hpp"
#include "lrtrunc/pathmeasure.hpp"
#include "lrtrunc/potts.hpp"
#include "lrtrunc/table.hpp"

namespace lrtrunc {

/// Subcommand name -> experiment kind.
std::string kind_for_subcommand(const std::string& subcommand);

Kernel kernel_from_config(const ExperimentConfig& config);
Potential potential_from_config(const ExperimentConfig& config);
PathMeasure measure_from_config(const ExperimentConfig& config, const Kernel& kernel);

/// Validates the whole configuration, then runs the experiment. Throws
/// ConfigError for invalid input and ResourceLimitError for runs above caps.
ResultTable run(const ExperimentConfig& config);

}  // namespace lrtrunc
