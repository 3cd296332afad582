#include "ppjump/presets.hpp"

#include <stdexcept>

namespace ppjump {

namespace detail {
extern const Preset kPresetTable[];
extern const std::size_t kPresetCount;
}  // namespace detail

std::span<const Preset> presets() { return {detail::kPresetTable, detail::kPresetCount}; }

const Preset* find_preset(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string preset_summary(const Preset& p) {
  std::string_view line = p.text.substr(0, p.text.find('\n'));
  if (!line.starts_with('#')) return {};
  line.remove_prefix(1);
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  return std::string(line);
}

ScenarioConfig load_preset(std::string_view name, const LoadOptions& options) {
  const Preset* p = find_preset(name);
  if (!p) throw std::out_of_range("unknown preset '" + std::string(name) + "'");
  return parse_config(p->text, options);
}

}  // namespace ppjump
