#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hydrolab/experiment.hpp"

namespace hydrolab {

inline constexpr int kConfigSchemaVersion = 1;

nlohmann::json to_json(const JumpRateSpec& g);
JumpRateSpec rate_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnvironmentSource& src);
EnvironmentSource environment_from_json(const nlohmann::json& j);

std::string mode_name(EquilibriumMode mode);
EquilibriumMode mode_from_name(const std::string& name);

/// Full document: top-level model keys plus the "experiment" section.
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const nlohmann::json& doc);

/// Parses a config file and checks schema_version and top-level keys.
nlohmann::json load_config(const std::string& path);
void check_schema(const nlohmann::json& doc);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& doc);

}  // namespace hydrolab
