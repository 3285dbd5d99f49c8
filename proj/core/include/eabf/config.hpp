// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "eabf/experiments.hpp"

namespace eabf {

/// Parses an ExperimentConfig from its JSON form; unknown keys are
/// rejected so typos fail loudly. The schema is documented in README.md.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::string experiment_config_json(const ExperimentConfig& config);
void save_experiment_config(const std::filesystem::path& path,
                            const ExperimentConfig& config);

}  // namespace eabf
