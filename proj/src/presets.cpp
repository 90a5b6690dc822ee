#include "lowrankq/presets.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>

namespace lowrankq {

namespace {

std::vector<Preset> build_presets() {
  std::vector<Preset> out;

  Preset fl{"frozenlake-eps-sweep",
            "FrozenLake: tabular Q-learning vs rank-2 SGD over exploration levels", {}};
  for (const char* eps : {"0.1", "0.2", "0.3", "0.4", "0.5"}) {
    const std::string common = std::string("env = frozenlake\ngamma = 0.95\nepsilon = ") + eps +
                               "\nepisodes = 5000\neval_every = 50\nseeds = 100\n";
    fl.runs.push_back({std::string("tabular-eps") + eps,
                       common + "agent = tabular\nalpha = 0.1\n"});
    fl.runs.push_back({std::string("lr-m2-eps") + eps,
                       common + "agent = lr_sgd\nrank = 2\nalpha = 0.01\nnormalize = true\ninit_scale = 0.02\n"});
  }
  out.push_back(fl);

  const std::string pend =
      "env = pendulum\ngamma = 0.99\nepsilon = 0.2\nepisodes = 30000\neval_every = 100\n"
      "seeds = 10\n";
  out.push_back(Preset{
      "pendulum-compare",
      "Pendulum: tabular at 5 and 41 torques vs low-rank SGD variants at 41 torques",
      {{"tabular-a5", pend + "agent = tabular\nactions = 5\nalpha = 0.1\n"},
       {"tabular-a41", pend + "agent = tabular\nactions = 41\nalpha = 0.1\n"},
       {"lr-m3", pend + "agent = lr_sgd\nactions = 41\nrank = 3\nalpha = 0.001\n"},
       {"lr-m5-reg",
        pend + "agent = lr_sgd\nactions = 41\nrank = 5\nalpha = 0.001\neta = 0.001\n"},
       {"lr-m10-reshaped", pend + "agent = lr_sgd\nactions = 41\nrank = 10\n"
                                  "plan = flat_near_square\nalpha = 0.001\n"}}});

  const std::string acro =
      "env = acrobot\ngamma = 0.99\nepsilon = 0.1\nepisodes = 10000\neval_every = 250\n"
      "seeds = 10\nagent = lr_sgd\nrank = 2\nplan = flat_near_square\n";
  out.push_back(Preset{"acrobot-lr",
                       "Acrobot: reshaped rank-2 SGD with and without gradient normalization",
                       {{"lr-m2-reshaped", acro + "alpha = 0.01\nnormalize = false\n"},
                        {"lr-m2-reshaped-normalized", acro + "alpha = 0.01\nnormalize = true\n"}}});
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::vector<ExperimentConfig> resolve_preset(const Preset& preset,
                                             const std::vector<Override>& overrides) {
  std::vector<ExperimentConfig> configs;
  for (const auto& run : preset.runs) {
    std::vector<Override> ov = overrides;
    ov.insert(ov.begin(), Override{"label", run.label});
    ExperimentConfig cfg = parse_config(run.config_text, ov);
    cfg.out_dir = (std::filesystem::path(cfg.out_dir) / run.label).string();
    configs.push_back(cfg);
  }
  return configs;
}

ParameterRow parameter_row(const ExperimentConfig& config) {
  const ReshapePlan p =
      make_plan(EnvConfig{config.env, config.env == EnvKind::pendulum ? config.actions : 0},
                config.plan);
  ParameterRow row;
  row.label = config.label;
  row.agent = to_string(config.agent);
  row.rows = p.rows();
  row.cols = p.cols();
  row.parameters = config.agent == Variant::tabular
                       ? p.table_parameters()
                       : p.factor_parameters(static_cast<std::size_t>(config.rank));
  return row;
}

std::string format_parameter_table(const std::vector<ParameterRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "run" << std::setw(10) << "agent" << std::right
      << std::setw(8) << "rows" << std::setw(8) << "cols" << std::setw(12) << "parameters"
      << "\n";
  for (const auto& r : rows)
    out << std::left << std::setw(28) << r.label << std::setw(10) << r.agent << std::right
        << std::setw(8) << r.rows << std::setw(8) << r.cols << std::setw(12) << r.parameters
        << "\n";
  return out.str();
}

}  // namespace lowrankq
