#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "dfvo/synth.hpp"
#include "dfvo/tracker.hpp"

namespace dfvo {

// Flat "key = value" text. '#' starts a comment, blank lines are ignored,
// keys may not repeat. Unknown keys are hard errors at binding time.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

TrackerConfig tracker_config_from_file(const std::filesystem::path& path);
SceneConfig scene_config_from_file(const std::filesystem::path& path);

}  // namespace dfvo
