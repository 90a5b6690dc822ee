#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lowrankq/agents.hpp"
#include "lowrankq/environments.hpp"

namespace lowrankq {

enum class EnvKind { frozenlake, pendulum, acrobot };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct EnvConfig {
  EnvKind kind = EnvKind::frozenlake;
  std::size_t actions = 0;  // pendulum torque levels; 0 picks the default (41)

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

inline constexpr std::size_t kDefaultPendulumActions = 41;

std::unique_ptr<DiscreteEnvironment> make_environment(const EnvConfig& config);
ReshapePlan make_plan(const DiscreteEnvironment& env, PlanMode mode);
/// Plan of the configured environment without building the environment.
ReshapePlan make_plan(const EnvConfig& config, PlanMode mode);

struct TrialConfig {
  EnvConfig env;
  AgentConfig agent;
  std::size_t episodes = 1000;
  std::size_t eval_every = 50;  // 0 disables greedy evaluation
  bool keep_final_q = false;    // store the final D_S x D_A estimate

  friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

enum class Phase { train, eval };
std::string to_string(Phase p);

struct EpisodeRecord {
  std::size_t trial = 0;
  std::size_t episode = 0;
  Phase phase = Phase::train;
  double ret = 0.0;  // undiscounted
  std::size_t steps = 0;
  double epsilon = 0.0;  // at episode start
  std::optional<double> sfe;
  bool goal = false;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TrialResult {
  TrialConfig config;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::vector<EpisodeRecord> records;
  std::optional<std::size_t> first_success;  // first train episode reaching the goal
  std::optional<double> initial_sfe;         // before any learning
  std::size_t parameter_count = 0;
  bool failed = false;
  std::optional<std::size_t> last_good_episode;
  std::string failure;
  std::optional<QTable> final_q;
};

/// Plays one episode from `start`. With explore the agent acts epsilon-greedily
/// and learns from every transition; otherwise it acts greedily and is not
/// touched.
EpisodeRecord run_episode(DiscreteEnvironment& env, std::size_t start, Agent& agent,
                          bool explore, Rng& rng);
EpisodeRecord run_greedy_episode(DiscreteEnvironment& env, std::size_t start,
                                 const Agent& agent);

/// Independent stream `stream` derived from a trial's root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

TrialResult run_trial(const TrialConfig& config, std::uint64_t seed, std::size_t trial = 0);

/// LOWRANKQ_THREADS when set, hardware concurrency otherwise.
std::size_t worker_count();

/// Runs one trial per seed on a worker pool; results come back in seed order.
std::vector<TrialResult> run_trials(const TrialConfig& config,
                                    std::span<const std::uint64_t> seeds,
                                    std::size_t threads = 0);

struct Stat {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

/// Linear-interpolation quantile, p in [0, 1].
double quantile(std::vector<double> values, double p);
Stat describe(std::vector<double> values);

struct SeriesPoint {
  std::size_t episode = 0;
  Phase phase = Phase::train;
  std::size_t trials = 0;
  Stat ret;
  Stat steps;
  std::optional<Stat> sfe;
};

struct Summary {
  std::vector<SeriesPoint> train;
  std::vector<SeriesPoint> eval;
  std::vector<std::optional<std::size_t>> first_success;
  std::optional<double> median_first_success;  // unset when most trials never succeed
  std::size_t failed_trials = 0;
};

/// Per-episode medians and quartiles across trials. Trials that never reached
/// the goal count as +inf when taking the first-success median.
Summary aggregate(std::span<const TrialResult> trials);

std::optional<double> median_first_success(
    std::span<const std::optional<std::size_t>> first_success);

}  // namespace lowrankq
