#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "lclock/params.hpp"

namespace lclock {

// Flat key = value text, one setting per line, units spelled out in the key
// names. '#' starts a comment. Unknown or repeated keys are errors; every
// diagnostic carries the file name, line, and offending field.
PhysicalConfig parse_config(std::istream& in, const std::string& name);
PhysicalConfig load_config(const std::string& path);

// The full key set with every default materialized, in file order. Shared
// by the config writer and the run manifest.
std::vector<std::pair<std::string, std::string>> config_entries(
    const PhysicalConfig& config);

// Round-trippable text form of a config.
std::string format_config(const PhysicalConfig& config);

}  // namespace lclock
