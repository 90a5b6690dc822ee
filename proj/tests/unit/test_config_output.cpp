#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lowrankq/config.hpp"
#include "lowrankq/output.hpp"
#include "lowrankq/presets.hpp"

using namespace lowrankq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lowrankq_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("defaults from an empty file") {
  const ExperimentConfig c = parse_config("", {{"env", "frozenlake"}, {"agent", "tabular"}});
  CHECK(c.env == EnvKind::frozenlake);
  CHECK(c.agent == Variant::tabular);
  CHECK(c.gamma == 0.95);
  CHECK(c.alpha == StepSchedule{0.1, 0.0});
  CHECK(c.epsilon == ExplorationSchedule{0.1, 0.1, 0});
  CHECK(c.rank == 2);
  CHECK(c.plan == PlanMode::classic);
  CHECK(c.eta == 0.0);
  CHECK(c.episodes == 5000);
  CHECK(c.eval_every == 50);
  CHECK(c.actions == 4);
  CHECK(c.seeds == std::vector<std::uint64_t>{0});

  const ExperimentConfig p = parse_config("env = pendulum\nagent = lr_sgd\n");
  CHECK(p.gamma == 0.99);
  CHECK(p.actions == 41);
  CHECK(p.alpha.initial == 0.01);
  CHECK(parse_config("env = acrobot\nagent = lr_sgd\nplan = flat_near_square\n").alpha.initial ==
        0.005);
}

TEST_CASE("config errors name the key") {
  try {
    parse_config("env = frozenlake\ngamma = 1.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gamma");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
  try {
    parse_config("# comment\n\nbogus = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "bogus");
    CHECK(e.line() == 3);
  }
  try {
    parse_config("", {{"gamma", "0"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gamma");
    CHECK(e.line() == 0);
  }
  CHECK_THROWS_AS(parse_config("gamma\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("env = mountaincar\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epsilon = 1.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("agent = lr_sgd\nrank = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("env = pendulum\nagent = lr_als\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("actions = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seeds = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("episodes = 1e3\n"), ConfigError);
}

TEST_CASE("overrides apply after the file") {
  const ExperimentConfig c = parse_config("gamma = 0.9\nepisodes = 10\n", {{"gamma", "0.8"}});
  CHECK(c.gamma == 0.8);
  CHECK(c.episodes == 10);
}

TEST_CASE("parse then serialize round trip") {
  const std::string text =
      "label = x\nenv = pendulum\nagent = lr_sgd\nrank = 5\nplan = flat_near_square\n"
      "gamma = 0.993\nalpha = inv(0.01, 0.0001)\nepsilon = linear(1, 0.05, 20000)\neta = 0.001\n"
      "als_k = 3\nnormalize = yes\ninit_scale = 0.05\nactions = 21\nepisodes = 77\n"
      "eval_every = 7\nseeds = [5, 9, 2]\nout_dir = somewhere/else\n";
  const ExperimentConfig a = parse_config(text);
  const ExperimentConfig b = parse_config(serialize_config(a));
  CHECK(a == b);
  CHECK(serialize_config(a) == serialize_config(b));
  CHECK(a.alpha == StepSchedule{0.01, 0.0001});
  CHECK(a.epsilon == ExplorationSchedule{1.0, 0.05, 20000});
  CHECK(a.seeds == std::vector<std::uint64_t>{5, 9, 2});
  CHECK(a.normalize);

  // every key appears in the serialized form
  const std::string s = serialize_config(a);
  for (const auto& k : config_keys()) CHECK(s.find(k + " = ") != std::string::npos);

  for (const auto& preset : presets())
    for (const auto& cfg : resolve_preset(preset))
      CHECK(parse_config(serialize_config(cfg)) == cfg);
}

TEST_CASE("value grammars") {
  CHECK(parse_step_schedule("0.25") == StepSchedule{0.25, 0.0});
  CHECK(parse_step_schedule(" inv( 1 , 2 ) ") == StepSchedule{1.0, 2.0});
  CHECK_THROWS(parse_step_schedule("inv(1)"));
  CHECK_THROWS(parse_step_schedule("fast"));
  CHECK(format_step_schedule({0.5, 0.0}) == "0.5");
  CHECK(format_step_schedule({0.5, 0.1}) == "inv(0.5, 0.1)");
  CHECK(parse_exploration_schedule("0.3") == ExplorationSchedule{0.3, 0.3, 0});
  CHECK(parse_exploration_schedule("linear(1, 0.1, 50)") == ExplorationSchedule{1.0, 0.1, 50});
  CHECK_THROWS(parse_exploration_schedule("linear(1, 0.1)"));
  CHECK(parse_seeds("3") == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(parse_seeds("4, 2") == std::vector<std::uint64_t>{4, 2});
  CHECK(parse_seeds("[7]") == std::vector<std::uint64_t>{7});
  CHECK_THROWS(parse_seeds("[1, x]"));
  CHECK(format_seeds({0, 1, 2}) == "3");
  CHECK(format_seeds({1, 2}) == "[1, 2]");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("emit_outputs writes and reloads") {
  ExperimentConfig cfg = parse_config("episodes = 60\neval_every = 20\nseeds = 3\nepsilon = 0.3\n");
  const fs::path dir = scratch_dir("emit");
  cfg.out_dir = dir.string();
  const auto trials = run_trials(to_trial_config(cfg), cfg.seeds, 1);
  const Summary summary = aggregate(trials);
  emit_outputs(cfg, trials, summary, dir);

  for (const char* f : {"episodes.csv", "summary.json", "plot_data.csv"})
    CHECK(fs::exists(dir / f));

  const std::string csv = read_file(dir / "episodes.csv");
  std::size_t total = 0;
  for (const auto& t : trials) total += t.records.size();
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == total + 1);

  const auto reloaded = parse_episodes_csv(csv);
  REQUIRE(reloaded.size() == total);
  std::size_t i = 0;
  for (const auto& t : trials)
    for (auto rec : t.records) {
      rec.goal = false;  // not a CSV column
      CHECK(reloaded[i++] == rec);
    }

  const auto json = nlohmann::json::parse(read_file(dir / "summary.json"));
  for (const auto& f : summary_fields()) CHECK(json.contains(f));
  CHECK(json["seeds"].size() == 3);
  CHECK(json["parameter_count"] == 64);
  CHECK(json["series"]["train"].size() == 60);
  CHECK(json["series"]["eval"].size() == 3);
  CHECK(parse_config(json["config_text"].get<std::string>()) == cfg);

  // a rerun produces byte-identical records
  const fs::path again = scratch_dir("emit_again");
  const auto trials2 = run_trials(to_trial_config(cfg), cfg.seeds, 2);
  emit_outputs(cfg, trials2, aggregate(trials2), again);
  CHECK(read_file(again / "episodes.csv") == csv);
  CHECK(read_file(again / "plot_data.csv") == read_file(dir / "plot_data.csv"));
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("unwritable output directory") {
  const fs::path base = scratch_dir("blocked");
  fs::create_directories(base);
  {
    std::ofstream(base / "file") << "x";
  }
  ExperimentConfig cfg = parse_config("episodes = 2\n");
  const auto trials = run_trials(to_trial_config(cfg), cfg.seeds, 1);
  CHECK_THROWS_AS(emit_outputs(cfg, trials, aggregate(trials), base / "file" / "sub"), OutputError);
  CHECK_THROWS_AS(read_file(base / "missing"), OutputError);
  CHECK_THROWS_AS(parse_episodes_csv("nope\n"), std::invalid_argument);
  fs::remove_all(base);
}

TEST_CASE("preset parameter tables") {
  const Preset* fl = find_preset("frozenlake-eps-sweep");
  REQUIRE(fl);
  const auto fl_cfgs = resolve_preset(*fl);
  CHECK(fl_cfgs.size() == 10);
  CHECK(parameter_row(fl_cfgs[0]).parameters == 64);
  CHECK(parameter_row(fl_cfgs[1]).parameters == 40);

  const auto pend = resolve_preset(*find_preset("pendulum-compare"));
  REQUIRE(pend.size() == 5);
  CHECK(parameter_row(pend[0]).parameters == 2121 * 5);
  CHECK(parameter_row(pend[1]).parameters == 2121 * 41);
  CHECK(parameter_row(pend[2]).parameters == (2121 + 41) * 3);
  const ParameterRow reshaped = parameter_row(pend[4]);
  CHECK(reshaped.rows == 295);
  CHECK(reshaped.cols == 295);
  CHECK(reshaped.parameters == (295 + 295) * 10);

  const auto acro = resolve_preset(*find_preset("acrobot-lr"));
  REQUIRE(acro.size() == 2);
  CHECK(parameter_row(acro[0]).parameters == 18014);
  CHECK(parameter_row(acro[0]).parameters < 20000);

  const auto over = resolve_preset(*fl, {{"out_dir", "o"}, {"episodes", "3"}});
  CHECK(over[0].episodes == 3);
  CHECK(fs::path(over[0].out_dir) == fs::path("o") / "tabular-eps0.1");
  CHECK(over[0].label == "tabular-eps0.1");

  const std::string table = format_parameter_table({parameter_row(fl_cfgs[1])});
  CHECK(table.find("lr-m2-eps0.1") != std::string::npos);
  CHECK(table.find("40") != std::string::npos);
  CHECK(find_preset("foo") == nullptr);
  CHECK(preset_names().size() == 3);
}
