#pragma once

#include <string>
#include <vector>

#include "lowrankq/config.hpp"

namespace lowrankq {

struct PresetRun {
  std::string label;
  std::string config_text;  // parse_config input
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetRun> runs;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Resolves every run of a preset with `overrides` applied on top; each run
/// writes to <out_dir>/<label>.
std::vector<ExperimentConfig> resolve_preset(const Preset& preset,
                                             const std::vector<Override>& overrides = {});

struct ParameterRow {
  std::string label;
  std::string agent;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t parameters = 0;
};

ParameterRow parameter_row(const ExperimentConfig& config);
std::string format_parameter_table(const std::vector<ParameterRow>& rows);

}  // namespace lowrankq
