#include "cdand/presets.hpp"

#include <cmath>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

// Heavy-tail LoS noise as a two-component zero-mean mixture: a nominal core
// plus a 10% outlier component sized to reach the requested overall std.
NoiseSpec heavy_tail_noise(double core_std, double total_std) {
  const double outlier_var = (total_std * total_std - 0.9 * core_std * core_std) / 0.1;
  return NoiseSpec{{{0.9, core_std}, {0.1, std::sqrt(outlier_var)}}};
}

std::vector<Preset> build_presets() {
  std::vector<Preset> presets;

  {
    Preset p;
    p.name = "inf-sh-fr1";
    p.scenario.width = 300.0;
    p.scenario.height = 150.0;
    p.scenario.gnb_count = 18;
    p.scenario.nlos_prob = 0.18;
    p.scenario.noise_los = NoiseSpec{{{1.0, 5.92}}};
    p.scenario.nlos_bias = {BiasFamily::truncated_gaussian, 26.06, 20.08};
    p.scenario.preset_name = p.name;
    p.lambda = 1.4;
    p.rers_plain = {0.63, 0.36};
    p.rers_hd = {0.88, 0.83};
    p.rers_sd = {0.98, 0.96};
    presets.push_back(p);
  }
  {
    Preset p;
    p.name = "inf-sh-fr2";
    p.scenario.width = 300.0;
    p.scenario.height = 150.0;
    p.scenario.gnb_count = 18;
    p.scenario.nlos_prob = 0.18;
    p.scenario.noise_los = heavy_tail_noise(5.92, 48.44);
    // class spread here is far wider than a zero-truncated Gaussian allows
    p.scenario.nlos_bias = {BiasFamily::lognormal, 64.69, 318.11};
    p.scenario.preset_name = p.name;
    p.lambda = 1.1;
    p.rers_plain = {0.53, 0.26};
    p.rers_hd = {0.85, 0.75};
    p.rers_sd = {0.96, 0.94};
    presets.push_back(p);
  }
  {
    Preset p;
    p.name = "inf-dh-fr1";
    p.scenario.width = 120.0;
    p.scenario.height = 60.0;
    p.scenario.gnb_count = 18;
    p.scenario.nlos_prob = 0.56;
    p.scenario.noise_los = NoiseSpec{{{1.0, 14.04}}};
    p.scenario.nlos_bias = {BiasFamily::truncated_gaussian, 25.13, 19.24};
    p.scenario.preset_name = p.name;
    p.lambda = 0.5;
    p.rers_plain = {0.15, 0.08};
    p.rers_hd = {0.23, 0.1};
    p.rers_sd = {0.30, 0.15};
    presets.push_back(p);
  }
  {
    Preset p;
    p.name = "inf-dh-fr2";
    p.scenario.width = 120.0;
    p.scenario.height = 60.0;
    p.scenario.gnb_count = 18;
    p.scenario.nlos_prob = 0.56;
    p.scenario.noise_los = NoiseSpec{{{1.0, 11.62}}};
    p.scenario.nlos_bias = {BiasFamily::truncated_gaussian, 26.84, 22.71};
    p.scenario.preset_name = p.name;
    p.lambda = 0.5;
    p.rers_plain = {0.15, 0.08};
    p.rers_hd = {0.23, 0.1};
    p.rers_sd = {0.30, 0.15};
    presets.push_back(p);
  }
  return presets;
}

}  // namespace

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> presets = build_presets();
  return presets;
}

const Preset& preset_by_name(const std::string& name) {
  for (const Preset& p : all_presets())
    if (p.name == name) return p;
  throw InvalidConfig("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : all_presets()) names.push_back(p.name);
  return names;
}

}  // namespace cdand
