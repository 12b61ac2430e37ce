#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pool::harness {

/// One row of metrics.csv. Rewards are per-agent cumulative episode rewards
/// over the learning team.
struct EpisodeRecord {
  int episode = 0;
  double mean_reward = 0.0;
  double min_reward = 0.0;
  double max_reward = 0.0;
  double food_rate = 0.0;  // maze: fraction of agents that reached food
  double hole_rate = 0.0;  // maze: fraction that fell into a hole
  int kills = 0;           // battle: enemies killed by the learning team
  int deaths = 0;          // battle: learning-team agents lost
  double epsilon = 0.0;
  int steps = 0;
  double wall_ms = 0.0;  // not written to metrics.csv (see timing.csv)

  friend bool operator==(const EpisodeRecord& a, const EpisodeRecord& b) {
    return a.episode == b.episode && a.mean_reward == b.mean_reward &&
           a.min_reward == b.min_reward && a.max_reward == b.max_reward &&
           a.food_rate == b.food_rate && a.hole_rate == b.hole_rate && a.kills == b.kills &&
           a.deaths == b.deaths && a.epsilon == b.epsilon && a.steps == b.steps;
  }
};

/// Fixed header of metrics.csv.
const std::string& metrics_header();

/// Deterministic CSV text: header plus one row per record. Reals use
/// 17 significant digits so rows round-trip exactly.
std::string format_metrics(std::span<const EpisodeRecord> records);
std::vector<EpisodeRecord> parse_metrics(const std::string& csv);

void write_metrics(const std::filesystem::path& path, std::span<const EpisodeRecord> records);
void write_timing(const std::filesystem::path& path, std::span<const EpisodeRecord> records);

/// Mean of mean_reward over the last `window` records (all if fewer).
double final_window_mean(std::span<const EpisodeRecord> records, int window);
double final_window_food_rate(std::span<const EpisodeRecord> records, int window);

/// Index of the episode ending the best trailing-window mean reward.
int best_trailing_episode(std::span<const EpisodeRecord> records, int window);

}  // namespace pool::harness
