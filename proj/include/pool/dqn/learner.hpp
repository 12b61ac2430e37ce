#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pool/dqn/config.hpp"
#include "pool/dqn/qnet.hpp"
#include "pool/dqn/replay.hpp"
#include "pool/medium.hpp"
#include "pool/nn/dense.hpp"

namespace pool::dqn {

/// Online and target networks, their optimizers and the replay buffer of
/// one team (all agents share parameters).
class Learner {
 public:
  Learner(int obs_size, int window_size, int n_actions, const LearnerConfig& cfg, std::uint64_t seed);

  const LearnerConfig& config() const { return cfg_; }
  QNetwork online;
  QNetwork target;
  nn::Adam processor_opt;
  nn::Adam receptor_opt;
  ReplayBuffer buffer;
  std::int64_t env_steps = 0;
  std::int64_t grad_steps = 0;
  double last_loss = 0.0;

  /// One sampled batch and one optimizer step; target sync every
  /// target_sync gradient steps. No-op (returns false) below warmup.
  bool train_step(Rng& rng);

 private:
  LearnerConfig cfg_;
};

struct AgentInput {
  std::span<const double> obs;
  Cell cell;  // virtual cell
};

struct ActOutput {
  std::vector<int> actions;
  DepositBatch deposits;
  std::vector<std::vector<double>> windows;  // the window each agent's q was computed from
};

/// One forward pass per agent against `field`: q = Q(obs, Rec(window)).
/// With pheromones every agent deposits standardize(q) over its influence
/// domain; without, windows are zero and nothing is deposited. Actions are
/// epsilon-greedy on q; when select is false no actions are drawn and the
/// rng is untouched.
ActOutput act_and_deposit(const QNetwork& net, std::span<const AgentInput> agents, const PheromoneField& field,
                          const MediumConfig& medium, bool use_pheromones, double epsilon, Rng& rng,
                          bool select = true);

}  // namespace pool::dqn
