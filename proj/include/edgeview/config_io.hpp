#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edgeview/scenario.hpp"

namespace edgeview::config_io {

// TOML keys are the ScenarioConfig field names. Missing keys keep their
// defaults; unknown keys raise a Configuration error.
scenario::ScenarioConfig parse_config(std::string_view toml_text);
scenario::ScenarioConfig load_config(const std::filesystem::path& path);
std::string to_toml(const scenario::ScenarioConfig& config);

// Named scenarios: fig3-3bs, fig2-4bs, dense-k16.
scenario::ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace edgeview::config_io
