#pragma once

#include <string>

#include "hm/orchestrator.hpp"

namespace hm {

/// Parses and validates a JSON experiment config. Validation failures throw
/// ConfigError with the offending field path in the message.
ExperimentConfig load_config_json(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);
std::string dump_config_json(const ExperimentConfig& config);

}  // namespace hm
