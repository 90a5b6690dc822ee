#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lowrankq/config.hpp"
#include "lowrankq/output.hpp"
#include "lowrankq/presets.hpp"

namespace {

using namespace lowrankq;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

const Flag kFlags[] = {
    {"--env", "env", "frozenlake | pendulum | acrobot"},
    {"--agent", "agent", "tabular | lr_sgd | lr_als"},
    {"--rank", "rank", "factor rank M"},
    {"--plan", "plan", "classic | flat_near_square"},
    {"--gamma", "gamma", "discount factor in (0, 1)"},
    {"--alpha", "alpha", "step size: constant or inv(a, c)"},
    {"--epsilon", "epsilon", "exploration: constant or linear(start, floor, steps)"},
    {"--eta", "eta", "Frobenius regularization weight"},
    {"--als-k", "als_k", "alternating least-squares sweeps per step"},
    {"--episodes", "episodes", "training episodes per trial"},
    {"--eval-every", "eval_every", "greedy evaluation period (0 disables)"},
    {"--seeds", "seeds", "seed count N or list [a, b, ...]"},
    {"--out-dir", "out_dir", "output directory"},
    {"--actions", "actions", "pendulum torque levels"},
    {"--init-scale", "init_scale", "factor initialization scale"},
    {"--label", "label", "run label"},
};

// Returns false when some trial diverged.
bool run_config(const ExperimentConfig& cfg) {
  const TrialConfig tc = to_trial_config(cfg);
  std::cerr << "[" << (cfg.label.empty() ? "run" : cfg.label) << "] " << cfg.seeds.size()
            << " trials x " << cfg.episodes << " episodes\n";
  const auto trials = run_trials(tc, cfg.seeds);
  const Summary summary = aggregate(trials);
  emit_outputs(cfg, trials, summary, cfg.out_dir);
  for (const auto& t : trials)
    if (t.failed) std::cerr << "trial " << t.trial << " (seed " << t.seed << "): " << t.failure << "\n";
  if (summary.median_first_success)
    std::cerr << "  median first success: " << *summary.median_first_success << "\n";
  return summary.failed_trials == 0;
}

std::string parameters_csv(const std::vector<ParameterRow>& rows) {
  std::string out = "run,agent,rows,cols,parameters\n";
  for (const auto& r : rows)
    out += r.label + ',' + r.agent + ',' + std::to_string(r.rows) + ',' + std::to_string(r.cols) +
           ',' + std::to_string(r.parameters) + '\n';
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Q-learning experiments"};
  std::string preset_name;
  std::string config_path;
  bool normalize = false;
  bool table_only = false;

  app.add_option("--preset", preset_name, "named experiment grid");
  app.add_option("--config", config_path, "key = value configuration file");
  std::vector<std::string> raw(std::size(kFlags));
  std::vector<CLI::Option*> opts;
  for (std::size_t i = 0; i < std::size(kFlags); ++i)
    opts.push_back(app.add_option(kFlags[i].name, raw[i], kFlags[i].help));
  auto* norm_opt = app.add_flag("--normalize", normalize, "normalize SGD directions");
  app.add_flag("--parameters-only", table_only, "print the parameter table and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  std::vector<Override> overrides;
  for (std::size_t i = 0; i < std::size(kFlags); ++i)
    if (opts[i]->count() > 0) overrides.emplace_back(kFlags[i].key, raw[i]);
  if (norm_opt->count() > 0) overrides.emplace_back("normalize", normalize ? "true" : "false");

  std::vector<ExperimentConfig> configs;
  std::filesystem::path table_dir;
  try {
    if (!preset_name.empty()) {
      if (!config_path.empty()) {
        std::cerr << "error: --preset and --config are mutually exclusive\n";
        return kExitConfig;
      }
      const Preset* preset = find_preset(preset_name);
      if (!preset) {
        std::cerr << "error: unknown preset '" << preset_name << "'; valid presets:";
        for (const auto& n : preset_names()) std::cerr << " " << n;
        std::cerr << "\n";
        return kExitConfig;
      }
      configs = resolve_preset(*preset, overrides);
      table_dir = std::filesystem::path(configs.front().out_dir).parent_path();
    } else {
      std::string text;
      if (!config_path.empty()) text = read_file(config_path);
      configs.push_back(parse_config(text, overrides));
      table_dir = configs.front().out_dir;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<ParameterRow> rows;
  for (const auto& c : configs) rows.push_back(parameter_row(c));
  std::cout << format_parameter_table(rows) << std::flush;
  if (table_only) return kExitOk;

  bool clean = true;
  try {
    std::error_code ec;
    std::filesystem::create_directories(table_dir, ec);
    write_file(table_dir / "parameters.csv", parameters_csv(rows));
    for (const auto& c : configs) clean = run_config(c) && clean;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return clean ? kExitOk : kExitRuntime;
}
