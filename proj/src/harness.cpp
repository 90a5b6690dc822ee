#include "lowrankq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "lowrankq/mdp_oracle.hpp"

namespace lowrankq {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::frozenlake: return "frozenlake";
    case EnvKind::pendulum: return "pendulum";
    case EnvKind::acrobot: return "acrobot";
  }
  return "?";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "frozenlake") return EnvKind::frozenlake;
  if (name == "pendulum") return EnvKind::pendulum;
  if (name == "acrobot") return EnvKind::acrobot;
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::string to_string(Phase p) { return p == Phase::train ? "train" : "eval"; }

std::unique_ptr<DiscreteEnvironment> make_environment(const EnvConfig& config) {
  switch (config.kind) {
    case EnvKind::frozenlake: return std::make_unique<FrozenLake>();
    case EnvKind::pendulum: {
      auto env = std::make_unique<Pendulum>(config.actions ? config.actions
                                                           : kDefaultPendulumActions);
      auto grids = env->default_grids();
      return discretized(std::move(env), std::move(grids));
    }
    case EnvKind::acrobot: {
      auto env = std::make_unique<Acrobot>();
      auto grids = env->default_grids();
      return discretized(std::move(env), std::move(grids));
    }
  }
  throw std::invalid_argument("unknown environment kind");
}

ReshapePlan make_plan(const DiscreteEnvironment& env, PlanMode mode) {
  return ReshapePlan(env.state_count(), env.action_count(), mode);
}

ReshapePlan make_plan(const EnvConfig& config, PlanMode mode) {
  return make_plan(*make_environment(config), mode);
}

EpisodeRecord run_greedy_episode(DiscreteEnvironment& env, std::size_t start,
                                 const Agent& agent) {
  EpisodeRecord rec;
  rec.phase = Phase::eval;
  rec.epsilon = 0.0;
  std::size_t s = start;
  const std::size_t limit = env.max_steps();
  while (rec.steps < limit) {
    const DiscreteStep st = env.step(agent.greedy_action(s));
    rec.ret += st.reward;
    ++rec.steps;
    s = st.state;
    if (st.terminal) {
      rec.goal = st.goal;
      break;
    }
    if (st.truncated) break;
  }
  return rec;
}

EpisodeRecord run_episode(DiscreteEnvironment& env, std::size_t start, Agent& agent,
                          bool explore, Rng& rng) {
  if (!explore) return run_greedy_episode(env, start, agent);
  EpisodeRecord rec;
  rec.phase = Phase::train;
  rec.epsilon = agent.epsilon();
  std::size_t s = start;
  const std::size_t limit = env.max_steps();
  while (rec.steps < limit) {
    const std::size_t a = agent.select_action(s, rng);
    const DiscreteStep st = env.step(a);
    agent.learn(Transition{s, a, st.reward, st.state, st.terminal, st.truncated});
    rec.ret += st.reward;
    ++rec.steps;
    s = st.state;
    if (st.terminal) {
      rec.goal = st.goal;
      break;
    }
    if (st.truncated) break;
  }
  return rec;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finalizer over (root, stream)
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

enum Stream : std::uint64_t { kTrainEnv = 1, kAgentInit = 2, kExplore = 3, kEvalEnv = 4 };

}  // namespace

TrialResult run_trial(const TrialConfig& config, std::uint64_t seed, std::size_t trial) {
  TrialResult result;
  result.config = config;
  result.seed = seed;
  result.trial = trial;

  auto train_env = make_environment(config.env);
  auto eval_env = make_environment(config.env);
  AgentConfig agent_cfg = config.agent;
  agent_cfg.seed = derive_seed(seed, kAgentInit);
  Agent agent(agent_cfg, make_plan(*train_env, agent_cfg.plan_mode));
  result.parameter_count = agent.parameter_count();

  Rng train_resets(derive_seed(seed, kTrainEnv));
  Rng explore(derive_seed(seed, kExplore));
  Rng eval_resets(derive_seed(seed, kEvalEnv));

  std::optional<QTable> oracle;
  if (config.env.kind == EnvKind::frozenlake)
    oracle = q_value_iteration(enumerate_frozenlake(), agent_cfg.gamma);
  auto sfe = [&]() -> std::optional<double> {
    if (!oracle) return std::nullopt;
    return frobenius_sq_error(agent.state_action_matrix(), *oracle);
  };
  result.initial_sfe = sfe();
  result.records.reserve(config.episodes +
                         (config.eval_every ? config.episodes / config.eval_every : 0));

  try {
    for (std::size_t ep = 0; ep < config.episodes; ++ep) {
      const std::size_t start = train_env->reset(train_resets());
      EpisodeRecord rec;
      try {
        rec = run_episode(*train_env, start, agent, true, explore);
      } catch (const NumericalDivergence& e) {
        throw NumericalDivergence(std::string(e.what()) + " (episode " + std::to_string(ep) +
                                      ", learning step " + std::to_string(agent.steps()) +
                                      ")",
                                  e.cell());
      }
      rec.trial = trial;
      rec.episode = ep;
      rec.sfe = sfe();
      if (rec.goal && !result.first_success) result.first_success = ep;
      result.records.push_back(rec);

      if (config.eval_every && (ep + 1) % config.eval_every == 0) {
        const std::size_t eval_start = eval_env->reset(eval_resets());
        EpisodeRecord ev = run_greedy_episode(*eval_env, eval_start, agent);
        ev.trial = trial;
        ev.episode = ep;
        ev.sfe = rec.sfe;
        result.records.push_back(ev);
      }
      result.last_good_episode = ep;
    }
  } catch (const NumericalDivergence& e) {
    result.failed = true;
    result.failure = e.what();
  }
  if (config.keep_final_q) result.final_q = agent.state_action_matrix();
  return result;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("LOWRANKQ_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::vector<TrialResult> run_trials(const TrialConfig& config,
                                    std::span<const std::uint64_t> seeds,
                                    std::size_t threads) {
  std::vector<TrialResult> results(seeds.size());
  if (seeds.empty()) return results;
  if (threads == 0) threads = worker_count();
  threads = std::min(threads, seeds.size());

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](std::size_t worker) {
    try {
      for (std::size_t i = next++; i < seeds.size(); i = next++)
        results[i] = run_trial(config, seeds[i], i);
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

Stat describe(std::vector<double> values) {
  return Stat{quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

std::optional<double> median_first_success(
    std::span<const std::optional<std::size_t>> first_success) {
  if (first_success.empty()) return std::nullopt;
  std::vector<double> v;
  for (const auto& f : first_success)
    v.push_back(f ? static_cast<double>(*f) : std::numeric_limits<double>::infinity());
  const double m = quantile(std::move(v), 0.5);
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

Summary aggregate(std::span<const TrialResult> trials) {
  if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
  for (const auto& t : trials)
    if (!(t.config == trials.front().config))
      throw std::invalid_argument("aggregate: trials have different configurations");

  struct Bucket {
    std::vector<double> ret, steps, sfe;
  };
  std::map<std::pair<std::size_t, int>, Bucket> buckets;
  Summary out;
  for (const auto& t : trials) {
    out.first_success.push_back(t.first_success);
    if (t.failed) ++out.failed_trials;
    for (const auto& r : t.records) {
      auto& b = buckets[{r.episode, r.phase == Phase::train ? 0 : 1}];
      b.ret.push_back(r.ret);
      b.steps.push_back(static_cast<double>(r.steps));
      if (r.sfe) b.sfe.push_back(*r.sfe);
    }
  }
  for (auto& [key, b] : buckets) {
    SeriesPoint p;
    p.episode = key.first;
    p.phase = key.second == 0 ? Phase::train : Phase::eval;
    p.trials = b.ret.size();
    p.ret = describe(b.ret);
    p.steps = describe(b.steps);
    if (!b.sfe.empty()) p.sfe = describe(b.sfe);
    (p.phase == Phase::train ? out.train : out.eval).push_back(p);
  }
  out.median_first_success = median_first_success(out.first_success);
  return out;
}

}  // namespace lowrankq
