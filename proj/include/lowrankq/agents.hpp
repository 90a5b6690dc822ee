#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lowrankq/factor_model.hpp"
#include "lowrankq/index_space.hpp"

namespace lowrankq {

using Rng = std::mt19937_64;

enum class Variant { tabular, lr_sgd, lr_als };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

// alpha_t = initial / (1 + decay * t); decay == 0 is a constant stepsize.
struct StepSchedule {
  double initial = 0.1;
  double decay = 0.0;

  double at(std::uint64_t t) const { return initial / (1.0 + decay * static_cast<double>(t)); }
  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

// Linear decay from `start` to `floor` over `steps` learning steps; steps == 0
// holds `start` forever.
struct ExplorationSchedule {
  double start = 0.1;
  double floor = 0.1;
  std::uint64_t steps = 0;

  double at(std::uint64_t t) const;
  friend bool operator==(const ExplorationSchedule&, const ExplorationSchedule&) = default;
};

struct AgentConfig {
  Variant variant = Variant::tabular;
  PlanMode plan_mode = PlanMode::classic;
  double gamma = 0.95;
  StepSchedule alpha;
  ExplorationSchedule epsilon;
  Index rank = 2;
  double eta = 0.0;
  int als_k = 5;
  bool normalize = false;
  double init_scale = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

/// Stepsize used when a configuration does not give one.
double default_alpha(Variant variant, PlanMode mode);

inline constexpr std::size_t kAlsMaxCells = 10000;

struct Transition {
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t next_state = 0;
  bool terminal = false;
  bool truncated = false;
};

using GreedyPolicy = std::vector<std::size_t>;

class Agent {
 public:
  Agent(AgentConfig config, ReshapePlan plan);

  const AgentConfig& config() const { return config_; }
  const ReshapePlan& plan() const { return plan_; }
  std::uint64_t steps() const { return steps_; }
  double epsilon() const { return config_.epsilon.at(steps_); }
  double alpha() const { return config_.alpha.at(steps_); }
  std::size_t parameter_count() const;
  int damped_solves() const { return damped_solves_; }

  /// Q-values of every action of `state`, in action order.
  void q_values(std::size_t state, std::span<double> out) const;
  std::vector<double> q_values(std::size_t state) const;
  double q_value(std::size_t state, std::size_t action) const;

  /// Argmax with ties resolved to the lowest action index.
  std::size_t greedy_action(std::size_t state) const;
  /// Epsilon-greedy draw at the current exploration level.
  std::size_t select_action(std::size_t state, Rng& rng) const;
  std::size_t select_action(std::size_t state, Rng& rng, double epsilon) const;

  /// TD target r (terminal) or r + gamma * max_a Q(s', a).
  double td_target(const Transition& t) const;
  void learn(const Transition& t);

  GreedyPolicy greedy_policy() const;

  /// D_S x D_A matrix of estimates in state-action layout.
  QTable state_action_matrix() const;
  /// Overwrites a tabular agent's estimates; q must be D_S x D_A.
  void load_state_action_matrix(const QTable& q);

  bool is_tabular() const { return std::holds_alternative<QTable>(model_); }
  const QTable& table() const { return std::get<QTable>(model_); }
  const FactorPair& factors() const { return std::get<FactorPair>(model_); }

  /// Byte image of everything learning mutates.
  std::string serialize() const;

 private:
  double max_next(std::size_t state) const;

  AgentConfig config_;
  ReshapePlan plan_;
  std::variant<QTable, FactorPair> model_;
  std::uint64_t steps_ = 0;
  int damped_solves_ = 0;
  mutable std::vector<double> scratch_;
};

}  // namespace lowrankq
