#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <memory>
#include <vector>

#include "pool/dqn/config.hpp"
#include "pool/env/environment.hpp"
#include "pool/kv.hpp"
#include "pool/medium.hpp"
#include "pool/tabular.hpp"

namespace pool::harness {

enum class Algorithm { tabular_q, tabular_pool, dqn, dqn_pool };

std::string_view algorithm_name(Algorithm a);
/// Throws ConfigError for an unknown name.
Algorithm parse_algorithm(const std::string& name);
bool is_tabular(Algorithm a);
bool uses_pheromones(Algorithm a);

enum class EnvKind { maze, corridor, battle };
std::string_view env_kind_name(EnvKind k);

enum class TableMode { shared, independent };

struct TabularConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  EpsilonSchedule epsilon{1.0, 0.05, 1000};  // ticks are episodes
  double lambda = 0.3;
  TableMode table_mode = TableMode::shared;
};

/// Everything a run needs. Built from a key-value file (see README for the
/// key list) and CLI overrides.
struct ExperimentConfig {
  EnvKind env = EnvKind::maze;
  std::filesystem::path env_file;  // empty: built-in layout
  Algorithm algo = Algorithm::tabular_pool;
  int episodes = 2000;
  int max_steps = 0;  // 0: environment default
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path out_dir = "out";

  int agents_per_nest = 9;
  int corridor_length = 8;
  double corridor_slip = 0.0;

  // Medium. grid_h/grid_w of 0 mean "pick from environment"
  int grid_h = 8;
  int grid_w = 8;
  double beta = 0.5;
  int perception_radius = 1;
  int influence_radius = 0;
  bool persist_field = false;

  TabularConfig tabular;
  dqn::LearnerConfig learner;

  std::filesystem::path opponent_checkpoint;  // battle: frozen opponent
  double opponent_epsilon = 0.05;
  int eval_episodes = 20;
  int best_window = 20;
  bool record_timing = false;  // writes timing.csv beside metrics.csv

  void validate() const;
};

/// All recognised configuration keys.
const std::vector<std::string>& config_keys();

/// Parse a config; relative env_file / opponent paths resolve against
/// base_dir. Throws ConfigError.
ExperimentConfig parse_config(const KeyValueText& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form. gamma and the eps_* keys are written for the
/// algorithm's own learner family only, so a round trip preserves every
/// field that algorithm reads.
std::string format_config(const ExperimentConfig& cfg);

/// Environment instance for the configuration.
std::unique_ptr<env::Environment> make_environment(const ExperimentConfig& cfg);

/// Medium geometry matching the environment's world extent.
MediumConfig medium_config(const ExperimentConfig& cfg, const env::Environment& environment);

}  // namespace pool::harness
