#pragma once

// Scenario files (JSON). Every field is optional except `agents`; missing
// fields take the defaults of ScenarioConfig. Unknown fields are errors.

#include <filesystem>
#include <string>
#include <string_view>

#include "elastic/simulate.hpp"

namespace elastic {

/// Parses and validates scenario text. Errors are kValidation and name the
/// offending field path.
ScenarioConfig parse_scenario(std::string_view text);

/// Reads a scenario file; kIo if it cannot be read.
ScenarioConfig parse_scenario_file(const std::filesystem::path& path);

/// Full config with every field spelled out; parse_scenario of the result
/// gives back an equal config.
std::string scenario_to_json(const ScenarioConfig& config);

/// Returns `text` with the field at `path` (e.g. "band.target_rate" or
/// "agents[1].params.reservation_rate") replaced by the JSON value `value`.
/// A bare word that is not valid JSON is taken as a string.
std::string override_field(std::string_view text, std::string_view path, std::string_view value);

}  // namespace elastic
