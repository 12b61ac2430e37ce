#pragma once

#include <cstdint>
#include <vector>

#include "pool/env/environment.hpp"
#include "pool/harness/config.hpp"
#include "pool/harness/metrics.hpp"
#include "pool/medium.hpp"
#include "pool/tabular.hpp"

namespace pool::harness {

/// Learners for one tabular run: the tables and which table each agent
/// slot reads and writes.
struct TabularLearners {
  std::vector<tabular::QTable> tables;
  std::vector<int> table_of_agent;
};

/// One table per nest (shared) or per agent (independent). Non-maze
/// environments share a single table in shared mode.
TabularLearners make_tabular_learners(const ExperimentConfig& cfg, const env::Environment& environment);

struct TabularRun {
  std::vector<EpisodeRecord> records;
  TabularLearners learners;
  PheromoneField field{1, 1, 2};
  TabularLearners best;  // tables at the best trailing-window episode
  int best_episode = -1;
};

/// Tabular Q / PooL tabular Q training. Per step: every live agent deposits
/// standardize(Q(s)) at its virtual cell and the field is committed; agents
/// then pick epsilon-greedy actions on raw Q (tabular-q) or on the fused
/// scores against their own cell's pheromone (tabular-pool); the
/// environment steps; TD updates are applied in agent-id order.
TabularRun run_tabular(const ExperimentConfig& cfg, std::uint64_t seed);

/// Greedy rollouts (epsilon = 0, no learning). Pheromone fusion stays active
/// for tabular-pool since it is part of the policy.
std::vector<EpisodeRecord> eval_tabular(const ExperimentConfig& cfg, const TabularLearners& learners,
                                        int episodes, std::uint64_t seed);

}  // namespace pool::harness
