#pragma once

#include <filesystem>
#include <string>

#include "clickhomodyne/types.hpp"

namespace clickhomodyne {

/// Parses a flat key=value config file. Lines starting with `#` and blank
/// lines are ignored. Unknown keys and missing required keys are errors.
///
/// Required keys: lo_flux_hz, path_efficiency, split_ratio, duration_ps,
/// seed, detector_{a,b}_efficiency, detector_{a,b}_dark_rate_hz,
/// detector_{a,b}_dead_time_ps. Optional: detector_{a,b}_latch_flux_hz.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

/// Serializes a config in the same key=value format (used for manifests).
std::string format_config(const SimConfig& cfg);

/// Checks every invariant and returns the config unchanged. Each violated
/// invariant is reported by field name; a local oscillator flux that would
/// drive either detector above its latch cutoff is rejected as latched.
SimConfig validate_config(const SimConfig& cfg);

}  // namespace clickhomodyne
