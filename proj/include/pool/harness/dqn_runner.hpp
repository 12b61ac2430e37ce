#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pool/dqn/learner.hpp"
#include "pool/harness/config.hpp"
#include "pool/harness/metrics.hpp"
#include "pool/medium.hpp"

namespace pool::harness {

struct DqnRun {
  std::vector<EpisodeRecord> records;
  std::optional<dqn::Learner> learner;
  PheromoneField field{1, 1, 2};
  dqn::QNetwork best;     // online nets at the best trailing-window episode
  int best_episode = -1;
};

/// Deep Q / PooL deep Q training of team 0 (every agent on single-team
/// environments). On two-team environments the other team is driven by the
/// frozen opponent with epsilon cfg.opponent_epsilon, or uniformly at random
/// when opponent is null.
///
/// Per step: each live learner computes q against the field committed last
/// step, deposits standardize(q) and picks its action from q; the deposits
/// are committed; the environment steps; transitions are stored with the
/// window used and the window of the new field; one gradient step runs every
/// train_every environment steps. With two_pass the learners act on a
/// second forward pass against the freshly committed field instead.
///
/// Fills `run` in place so a caller can checkpoint the last good state when
/// nn::NumericError escapes.
void run_dqn(const ExperimentConfig& cfg, std::uint64_t seed, const dqn::QNetwork* opponent, DqnRun& run);
DqnRun run_dqn(const ExperimentConfig& cfg, std::uint64_t seed, const dqn::QNetwork* opponent);

/// Both teams share a single plain DQN learner. Throws ConfigError unless
/// the environment has two teams with identical observation and action
/// spaces.
void run_selfplay(const ExperimentConfig& cfg, std::uint64_t seed, DqnRun& run);
DqnRun run_selfplay(const ExperimentConfig& cfg, std::uint64_t seed);

/// Greedy rollouts of `net` for team 0 (or all agents of a single-team
/// environment), no learning. Pheromones stay live for dqn-pool. Throws std::invalid_argument when episodes <= 0.
std::vector<EpisodeRecord> eval_dqn(const ExperimentConfig& cfg, const dqn::QNetwork& net,
                                    const dqn::QNetwork* opponent, int episodes, std::uint64_t seed);

/// Mean reward of each team over greedy rollouts where team 0 plays `net`
/// and team 1 plays uniformly at random.
struct TeamRewards {
  double team0 = 0.0;
  double team1 = 0.0;
};
TeamRewards eval_against_random(const ExperimentConfig& cfg, const dqn::QNetwork& net, int episodes,
                                std::uint64_t seed);

}  // namespace pool::harness
