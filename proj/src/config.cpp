#include "lowrankq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace lowrankq {

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + key + ": " + message
                              : key + ": " + message),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a real number, got '" + text + "'");
  return v;
}

std::uint64_t to_uint(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

// "name(a, b, ...)" -> {a, b, ...}; returns false if text is not of that form.
bool call_args(const std::string& text, const std::string& name,
               std::vector<std::string>& args) {
  const std::string t = trim(text);
  if (t.rfind(name + "(", 0) != 0 || t.back() != ')') return false;
  args = split(t.substr(name.size() + 1, t.size() - name.size() - 2), ',');
  return true;
}

struct Defaults {
  double gamma;
  std::size_t episodes;
  std::size_t eval_every;
  std::size_t actions;
};

Defaults env_defaults(EnvKind env) {
  switch (env) {
    case EnvKind::frozenlake: return {0.95, 5000, 50, frozenlake::kActions};
    case EnvKind::pendulum: return {0.99, 30000, 100, kDefaultPendulumActions};
    case EnvKind::acrobot: return {0.99, 10000, 250, acrobot::kTorques.size()};
  }
  return {0.95, 1000, 50, 1};
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "label",   "env",        "agent",    "rank",    "plan",     "gamma",
      "alpha",   "epsilon",    "eta",      "als_k",   "normalize", "init_scale",
      "actions", "episodes",   "eval_every", "seeds", "out_dir"};
  return keys;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

StepSchedule parse_step_schedule(const std::string& text) {
  std::vector<std::string> args;
  if (call_args(text, "inv", args)) {
    if (args.size() != 2) throw std::invalid_argument("inv(initial, decay) takes 2 values");
    return StepSchedule{to_double(args[0]), to_double(args[1])};
  }
  return StepSchedule{to_double(text), 0.0};
}

std::string format_step_schedule(const StepSchedule& s) {
  if (s.decay == 0.0) return format_double(s.initial);
  return "inv(" + format_double(s.initial) + ", " + format_double(s.decay) + ")";
}

ExplorationSchedule parse_exploration_schedule(const std::string& text) {
  std::vector<std::string> args;
  if (call_args(text, "linear", args)) {
    if (args.size() != 3)
      throw std::invalid_argument("linear(start, floor, steps) takes 3 values");
    return ExplorationSchedule{to_double(args[0]), to_double(args[1]), to_uint(args[2])};
  }
  const double e = to_double(text);
  return ExplorationSchedule{e, e, 0};
}

std::string format_exploration_schedule(const ExplorationSchedule& s) {
  if (s.steps == 0) return format_double(s.start);
  return "linear(" + format_double(s.start) + ", " + format_double(s.floor) + ", " +
         std::to_string(s.steps) + ")";
}

// "N" is a count (seeds 0..N-1); "[a, b]" or "a, b" is an explicit list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::string t = trim(text);
  const bool bracketed = !t.empty() && t.front() == '[';
  if (bracketed) {
    if (t.back() != ']') throw std::invalid_argument("unterminated seed list");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::uint64_t> seeds;
  if (!bracketed && t.find(',') == std::string::npos) {
    const std::uint64_t n = to_uint(t);
    if (n == 0) throw std::invalid_argument("seed count must be >= 1");
    seeds.resize(n);
    std::iota(seeds.begin(), seeds.end(), 0);
    return seeds;
  }
  for (const auto& part : split(t, ',')) seeds.push_back(to_uint(part));
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  bool iota = true;
  for (std::size_t i = 0; i < seeds.size(); ++i) iota = iota && seeds[i] == i;
  if (iota && !seeds.empty()) return std::to_string(seeds.size());
  std::string out = "[";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    out += (i ? ", " : "") + std::to_string(seeds[i]);
  return out + "]";
}

ExperimentConfig parse_config(const std::string& text, const std::vector<Override>& overrides) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> raw;
  const auto& keys = config_keys();
  auto put = [&](const std::string& key, const std::string& value, std::size_t line) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key, line, "unknown key");
    raw[key] = Entry{trim(value), line};
  };

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(trim(line), lineno, "expected 'key = value'");
    put(trim(line.substr(0, eq)), line.substr(eq + 1), lineno);
  }
  for (const auto& [key, value] : overrides) put(key, value, 0);

  ExperimentConfig cfg;
  auto with = [&](const std::string& key, auto&& apply) {
    const auto it = raw.find(key);
    if (it == raw.end()) return false;
    try {
      apply(it->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key, it->second.line, e.what());
    }
    return true;
  };
  auto line_of = [&](const std::string& key) -> std::size_t {
    const auto it = raw.find(key);
    return it == raw.end() ? 0 : it->second.line;
  };
  auto range_error = [&](const std::string& key, const std::string& msg) {
    return ConfigError(key, line_of(key), msg);
  };

  with("label", [&](const std::string& v) { cfg.label = v; });
  with("env", [&](const std::string& v) { cfg.env = env_kind_from_string(v); });
  with("agent", [&](const std::string& v) { cfg.agent = variant_from_string(v); });
  with("plan", [&](const std::string& v) { cfg.plan = plan_mode_from_string(v); });
  const Defaults d = env_defaults(cfg.env);

  cfg.gamma = d.gamma;
  cfg.episodes = d.episodes;
  cfg.eval_every = d.eval_every;
  cfg.actions = d.actions;
  cfg.alpha = StepSchedule{default_alpha(cfg.agent, cfg.plan), 0.0};
  cfg.epsilon = ExplorationSchedule{0.1, 0.1, 0};

  with("rank", [&](const std::string& v) { cfg.rank = static_cast<Index>(to_uint(v)); });
  with("gamma", [&](const std::string& v) { cfg.gamma = to_double(v); });
  with("alpha", [&](const std::string& v) { cfg.alpha = parse_step_schedule(v); });
  with("epsilon", [&](const std::string& v) { cfg.epsilon = parse_exploration_schedule(v); });
  with("eta", [&](const std::string& v) { cfg.eta = to_double(v); });
  with("als_k", [&](const std::string& v) { cfg.als_k = static_cast<int>(to_uint(v)); });
  with("normalize", [&](const std::string& v) { cfg.normalize = to_bool(v); });
  with("init_scale", [&](const std::string& v) { cfg.init_scale = to_double(v); });
  with("actions", [&](const std::string& v) { cfg.actions = to_uint(v); });
  with("episodes", [&](const std::string& v) { cfg.episodes = to_uint(v); });
  with("eval_every", [&](const std::string& v) { cfg.eval_every = to_uint(v); });
  with("seeds", [&](const std::string& v) { cfg.seeds = parse_seeds(v); });
  with("out_dir", [&](const std::string& v) { cfg.out_dir = v; });

  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
    throw range_error("gamma", "must lie in (0, 1), got " + format_double(cfg.gamma));
  if (!(cfg.alpha.initial > 0.0) || cfg.alpha.decay < 0.0)
    throw range_error("alpha", "stepsize must be positive with non-negative decay");
  auto unit = [](double e) { return e >= 0.0 && e <= 1.0; };
  if (!unit(cfg.epsilon.start) || !unit(cfg.epsilon.floor))
    throw range_error("epsilon", "must lie in [0, 1]");
  if (cfg.rank < 1) throw range_error("rank", "must be >= 1");
  if (cfg.eta < 0.0) throw range_error("eta", "must be >= 0");
  if (cfg.als_k < 1) throw range_error("als_k", "must be >= 1");
  if (!(cfg.init_scale > 0.0)) throw range_error("init_scale", "must be positive");
  if (cfg.episodes < 1) throw range_error("episodes", "must be >= 1");
  if (cfg.env == EnvKind::pendulum) {
    if (cfg.actions < 1) throw range_error("actions", "must be >= 1");
  } else if (cfg.actions != d.actions) {
    throw range_error("actions", to_string(cfg.env) + " has exactly " +
                                     std::to_string(d.actions) + " actions");
  }
  if (cfg.agent != Variant::tabular) {
    const ReshapePlan p = make_plan(EnvConfig{cfg.env, cfg.actions}, cfg.plan);
    if (static_cast<std::size_t>(cfg.rank) > std::min(p.rows(), p.cols()))
      throw range_error("rank", "exceeds min(rows, cols) = " +
                                    std::to_string(std::min(p.rows(), p.cols())));
    if (cfg.agent == Variant::lr_als && p.total_cells() > kAlsMaxCells)
      throw range_error("agent", "lr_als supports at most " + std::to_string(kAlsMaxCells) +
                                     " state-action cells");
  }
  return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  if (!c.label.empty()) out << "label = " << c.label << "\n";
  out << "env = " << to_string(c.env) << "\n"
      << "agent = " << to_string(c.agent) << "\n"
      << "rank = " << c.rank << "\n"
      << "plan = " << to_string(c.plan) << "\n"
      << "gamma = " << format_double(c.gamma) << "\n"
      << "alpha = " << format_step_schedule(c.alpha) << "\n"
      << "epsilon = " << format_exploration_schedule(c.epsilon) << "\n"
      << "eta = " << format_double(c.eta) << "\n"
      << "als_k = " << c.als_k << "\n"
      << "normalize = " << (c.normalize ? "true" : "false") << "\n"
      << "init_scale = " << format_double(c.init_scale) << "\n"
      << "actions = " << c.actions << "\n"
      << "episodes = " << c.episodes << "\n"
      << "eval_every = " << c.eval_every << "\n"
      << "seeds = " << format_seeds(c.seeds) << "\n"
      << "out_dir = " << c.out_dir << "\n";
  return out.str();
}

TrialConfig to_trial_config(const ExperimentConfig& c) {
  TrialConfig t;
  t.env = EnvConfig{c.env, c.env == EnvKind::pendulum ? c.actions : 0};
  t.agent.variant = c.agent;
  t.agent.plan_mode = c.plan;
  t.agent.gamma = c.gamma;
  t.agent.alpha = c.alpha;
  t.agent.epsilon = c.epsilon;
  t.agent.rank = c.rank;
  t.agent.eta = c.eta;
  t.agent.als_k = c.als_k;
  t.agent.normalize = c.normalize;
  t.agent.init_scale = c.init_scale;
  t.episodes = c.episodes;
  t.eval_every = c.eval_every;
  return t;
}

}  // namespace lowrankq
