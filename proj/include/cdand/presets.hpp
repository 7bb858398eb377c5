#pragma once

#include <string>
#include <vector>

#include "cdand/position.hpp"
#include "cdand/scenario.hpp"

namespace cdand {

/// Bundled per-site defaults: scenario statistics, detection threshold scale,
/// and the retained-fraction pairs for each filtering variant.
struct Preset {
  std::string name;
  ScenarioConfig scenario;
  double lambda = 1.0;
  FilterConfig rers_plain;  // cda-rers
  FilterConfig rers_hd;     // cda-nd-rers-hd
  FilterConfig rers_sd;     // cda-nd-rers-sd
};

const std::vector<Preset>& all_presets();
const Preset& preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace cdand
