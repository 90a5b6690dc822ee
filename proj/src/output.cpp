#include "lowrankq/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lowrankq {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("episodes.csv line " + std::to_string(line) +
                                ": bad number '" + s + "'");
  return v;
}

nlohmann::json stat_json(const Stat& s) {
  return {{"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"iqr", s.iqr()}};
}

nlohmann::json series_json(const std::vector<SeriesPoint>& series) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : series) {
    arr.push_back({{"episode", p.episode},
                   {"trials", p.trials},
                   {"return", stat_json(p.ret)},
                   {"steps", stat_json(p.steps)},
                   {"sfe", p.sfe ? stat_json(*p.sfe) : nlohmann::json(nullptr)}});
  }
  return arr;
}

}  // namespace

std::string episodes_csv(const std::vector<TrialResult>& trials) {
  std::string out = kEpisodesHeader;
  out += '\n';
  for (const auto& t : trials) {
    for (const auto& r : t.records) {
      out += std::to_string(r.trial);
      out += ',';
      out += std::to_string(r.episode);
      out += ',';
      out += to_string(r.phase);
      out += ',';
      out += format_double(r.ret);
      out += ',';
      out += std::to_string(r.steps);
      out += ',';
      out += format_double(r.epsilon);
      out += ',';
      if (r.sfe) out += format_double(*r.sfe);
      out += '\n';
    }
  }
  return out;
}

std::vector<EpisodeRecord> parse_episodes_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kEpisodesHeader))
    throw std::invalid_argument("episodes.csv: unexpected header");
  std::vector<EpisodeRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 7)
      throw std::invalid_argument("episodes.csv line " + std::to_string(lineno) +
                                  ": expected 7 fields");
    EpisodeRecord r;
    r.trial = parse_number<std::size_t>(c[0], lineno);
    r.episode = parse_number<std::size_t>(c[1], lineno);
    if (c[2] == "train") r.phase = Phase::train;
    else if (c[2] == "eval") r.phase = Phase::eval;
    else throw std::invalid_argument("episodes.csv: bad phase '" + c[2] + "'");
    r.ret = parse_number<double>(c[3], lineno);
    r.steps = parse_number<std::size_t>(c[4], lineno);
    r.epsilon = parse_number<double>(c[5], lineno);
    if (!c[6].empty()) r.sfe = parse_number<double>(c[6], lineno);
    records.push_back(r);
  }
  return records;
}

std::string plot_data_csv(const Summary& summary) {
  std::string out =
      "phase,episode,trials,return_median,return_q1,return_q3,steps_median,steps_q1,"
      "steps_q3,sfe_median,sfe_q1,sfe_q3\n";
  auto emit = [&out](const SeriesPoint& p) {
    out += to_string(p.phase) + ',' + std::to_string(p.episode) + ',' +
           std::to_string(p.trials) + ',' + format_double(p.ret.median) + ',' +
           format_double(p.ret.q1) + ',' + format_double(p.ret.q3) + ',' +
           format_double(p.steps.median) + ',' + format_double(p.steps.q1) + ',' +
           format_double(p.steps.q3) + ',';
    if (p.sfe)
      out += format_double(p.sfe->median) + ',' + format_double(p.sfe->q1) + ',' +
             format_double(p.sfe->q3);
    else
      out += ",,";
    out += '\n';
  };
  for (const auto& p : summary.train) emit(p);
  for (const auto& p : summary.eval) emit(p);
  return out;
}

const std::vector<std::string>& summary_fields() {
  static const std::vector<std::string> fields = {
      "config",        "config_text",          "seeds",         "parameter_count",
      "first_success", "median_first_success", "failed_trials", "failures",
      "series"};
  return fields;
}

nlohmann::json summary_json(const ExperimentConfig& config,
                            const std::vector<TrialResult>& trials, const Summary& summary) {
  nlohmann::json cfg = {{"label", config.label},
                        {"env", to_string(config.env)},
                        {"agent", to_string(config.agent)},
                        {"rank", config.rank},
                        {"plan", to_string(config.plan)},
                        {"gamma", config.gamma},
                        {"alpha", format_step_schedule(config.alpha)},
                        {"epsilon", format_exploration_schedule(config.epsilon)},
                        {"eta", config.eta},
                        {"als_k", config.als_k},
                        {"normalize", config.normalize},
                        {"init_scale", config.init_scale},
                        {"actions", config.actions},
                        {"episodes", config.episodes},
                        {"eval_every", config.eval_every},
                        {"out_dir", config.out_dir}};
  nlohmann::json first = nlohmann::json::array();
  for (const auto& f : summary.first_success)
    first.push_back(f ? nlohmann::json(*f) : nlohmann::json(nullptr));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& t : trials) {
    if (!t.failed) continue;
    failures.push_back({{"trial", t.trial},
                        {"seed", t.seed},
                        {"last_good_episode", t.last_good_episode
                                                  ? nlohmann::json(*t.last_good_episode)
                                                  : nlohmann::json(nullptr)},
                        {"message", t.failure}});
  }
  return {{"config", cfg},
          {"config_text", serialize_config(config)},
          {"seeds", config.seeds},
          {"parameter_count", trials.empty() ? 0 : trials.front().parameter_count},
          {"first_success", first},
          {"median_first_success", summary.median_first_success
                                       ? nlohmann::json(*summary.median_first_success)
                                       : nlohmann::json(nullptr)},
          {"failed_trials", summary.failed_trials},
          {"failures", failures},
          {"series", {{"train", series_json(summary.train)}, {"eval", series_json(summary.eval)}}}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw OutputError("write failed for " + path.string());
}

void emit_outputs(const ExperimentConfig& config, const std::vector<TrialResult>& trials,
                  const Summary& summary, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw OutputError("cannot create output directory " + dir.string());
  write_file(dir / "episodes.csv", episodes_csv(trials));
  write_file(dir / "summary.json", summary_json(config, trials, summary).dump(2) + "\n");
  write_file(dir / "plot_data.csv", plot_data_csv(summary));
}

}  // namespace lowrankq
