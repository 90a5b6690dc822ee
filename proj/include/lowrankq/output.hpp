#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowrankq/config.hpp"
#include "lowrankq/harness.hpp"

namespace lowrankq {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kEpisodesHeader = "trial,episode,phase,return,steps,epsilon,sfe";

std::string episodes_csv(const std::vector<TrialResult>& trials);
std::vector<EpisodeRecord> parse_episodes_csv(const std::string& text);

std::string plot_data_csv(const Summary& summary);

nlohmann::json summary_json(const ExperimentConfig& config,
                            const std::vector<TrialResult>& trials, const Summary& summary);

/// Field names summary_json always writes at top level.
const std::vector<std::string>& summary_fields();

/// Writes episodes.csv, summary.json and plot_data.csv into `dir`, creating it
/// if needed. Throws OutputError when the directory is not writable.
void emit_outputs(const ExperimentConfig& config, const std::vector<TrialResult>& trials,
                  const Summary& summary, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace lowrankq
