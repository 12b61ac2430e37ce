#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pool/harness/checkpoint.hpp"
#include "pool/harness/config.hpp"
#include "pool/harness/metrics.hpp"

namespace pool::harness {

struct TrainResult {
  std::vector<EpisodeRecord> records;
  Checkpoint checkpoint;
};

/// Trains one seed. With a non-empty out_dir writes metrics.csv,
/// checkpoint.bin, config.txt (and timing.csv when record_timing) there.
/// Battle dqn / dqn-pool runs load the frozen opponent from
/// cfg.opponent_checkpoint (ConfigError when unset). On nn::NumericError
/// the last good state goes to abort_checkpoint.bin before rethrowing.
TrainResult train_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Self-play pretraining; the checkpoint's policy is the final network.
TrainResult selfplay_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Network a checkpoint acts with: the best snapshot when present, else
/// the final online network.
const dqn::QNetwork& policy_network(const Checkpoint& ck);

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;  // population std over episodes
  double food_rate = 0.0;
  double hole_rate = 0.0;
  double kills = 0.0;
  double deaths = 0.0;
  std::vector<EpisodeRecord> records;
};

EvalSummary summarize_eval(std::vector<EpisodeRecord> records);

/// Greedy evaluation of a checkpoint under cfg (architecture and table
/// layout must match the environment). Throws std::invalid_argument when
/// episodes <= 0.
EvalSummary run_eval(const Checkpoint& ck, const ExperimentConfig& cfg, int episodes, std::uint64_t seed);

std::string format_eval(const EvalSummary& s);

enum class SweepAxis { beta, map_size, lambda };
SweepAxis parse_axis(const std::string& name);
std::string_view axis_name(SweepAxis a);

/// Copy of cfg with the axis set to value (map_size sets grid_h = grid_w).
ExperimentConfig with_axis(const ExperimentConfig& cfg, SweepAxis axis, double value);

struct SweepRow {
  double value = 0.0;
  std::vector<double> final_reward;  // per seed
  std::vector<double> final_food;
  double mean_reward = 0.0;
  double mean_food = 0.0;
};

/// One training run per (value, seed); final windows of `window` episodes.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                                int window = 100);
std::string format_sweep(SweepAxis axis, const std::vector<SweepRow>& rows);

struct CompareRow {
  std::uint64_t seed = 0;
  double reward_a = 0.0, reward_b = 0.0;
  double food_a = 0.0, food_b = 0.0;
};
struct CompareResult {
  Algorithm a = Algorithm::tabular_pool;
  Algorithm b = Algorithm::tabular_q;
  std::vector<CompareRow> rows;
};

/// Trains both algorithms on cfg.seeds; written under out_dir/<algo>/ when
/// out_dir is non-empty.
CompareResult run_compare(const ExperimentConfig& cfg, Algorithm a, Algorithm b, int window,
                          const std::filesystem::path& out_dir = {});
std::string format_compare(const CompareResult& c);

/// The non-pheromone counterpart (tabular-pool -> tabular-q, dqn-pool -> dqn)
/// and back.
Algorithm counterpart(Algorithm a);

}  // namespace pool::harness
