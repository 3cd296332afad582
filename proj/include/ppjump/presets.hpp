#ifndef PPJUMP_PRESETS_HPP
#define PPJUMP_PRESETS_HPP

#include <span>
#include <string>
#include <string_view>

#include "ppjump/config.hpp"

namespace ppjump {

/// A scenario shipped with the tool. The text is the presets/<name>.cfg file,
/// embedded at build time.
struct Preset {
  std::string_view name;
  std::string_view text;
};

std::span<const Preset> presets();
/// nullptr if no preset has this name.
const Preset* find_preset(std::string_view name);
/// The first comment line of the preset file, without the leading '#'.
std::string preset_summary(const Preset& p);
/// Parses a preset; throws std::out_of_range for an unknown name.
ScenarioConfig load_preset(std::string_view name, const LoadOptions& options = {});

}  // namespace ppjump

#endif  // PPJUMP_PRESETS_HPP
