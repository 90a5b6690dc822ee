#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lowrankq/harness.hpp"

namespace lowrankq {

/// Configuration problem tied to a key and, for file input, a 1-based line
/// (0 for command-line flags and for checks made after parsing).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

struct ExperimentConfig {
  std::string label;
  EnvKind env = EnvKind::frozenlake;
  Variant agent = Variant::tabular;
  Index rank = 2;
  PlanMode plan = PlanMode::classic;
  double gamma = 0.95;
  StepSchedule alpha;
  ExplorationSchedule epsilon;
  double eta = 0.0;
  int als_k = 5;
  bool normalize = false;
  double init_scale = 0.1;
  std::size_t actions = 4;
  std::size_t episodes = 5000;
  std::size_t eval_every = 50;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "results";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

using Override = std::pair<std::string, std::string>;

/// Parses `key = value` lines (`#` starts a comment), applies the overrides in
/// order, then fills environment- and agent-dependent defaults for every key
/// that was not given.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<Override>& overrides = {});

/// Writes every key, fully resolved, in a form parse_config reads back.
std::string serialize_config(const ExperimentConfig& config);

TrialConfig to_trial_config(const ExperimentConfig& config);

/// Keys accepted by parse_config.
const std::vector<std::string>& config_keys();

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Value grammars, exposed for tests.
StepSchedule parse_step_schedule(const std::string& text);
std::string format_step_schedule(const StepSchedule& s);
ExplorationSchedule parse_exploration_schedule(const std::string& text);
std::string format_exploration_schedule(const ExplorationSchedule& s);
std::vector<std::uint64_t> parse_seeds(const std::string& text);
std::string format_seeds(const std::vector<std::uint64_t>& seeds);

}  // namespace lowrankq
