#pragma once

#include <vector>

#include "pool/env/environment.hpp"
#include "pool/rng.hpp"

namespace pool::env {

/// Exact tables for the 1 x L corridor: start at cell 0, goal at cell L-1.
/// Actions: 0 = left, 1 = right. Each move costs step_reward; the move that
/// enters the goal pays goal_reward instead. With probability slip the
/// intended direction is reversed. Walls turn moves into no-ops.
struct CorridorMdp {
  int length = 0;
  int n_actions = 2;
  double slip = 0.0;
  double step_reward = -1.0;
  double goal_reward = 10.0;

  struct Outcome {
    int next_state;
    double probability;
    double reward;
  };

  int start_state() const { return 0; }
  int goal_state() const { return length - 1; }
  bool is_terminal(int s) const { return s == goal_state(); }
  /// Possible successors of (s, a), probabilities summing to 1. Empty for
  /// the terminal goal.
  std::vector<Outcome> outcomes(int s, int a) const;
};

/// Throws std::invalid_argument when length < 2 or slip is outside [0, 1].
CorridorMdp corridor_mdp(int length, double slip = 0.0);

/// Single-agent playable corridor backed by a CorridorMdp. Observation is a
/// one-hot encoding of the position; the state key is the position index.
class CorridorEnv final : public Environment {
 public:
  explicit CorridorEnv(CorridorMdp mdp, int max_steps = 50);

  const CorridorMdp& mdp() const { return mdp_; }
  int num_agents() const override { return 1; }
  int num_actions() const override { return mdp_.n_actions; }
  std::size_t observation_size() const override { return static_cast<std::size_t>(mdp_.length); }
  int world_h() const override { return 1; }
  int world_w() const override { return mdp_.length; }

  void reset(std::uint64_t seed) override;
  bool is_live(int agent) const override { return agent == 0 && live_; }
  Cell position(int /*agent*/) const override { return Cell{0, state_}; }
  std::int64_t state_key(int /*agent*/) const override { return state_; }
  using Environment::observe;
  void observe(int agent, std::span<double> out) const override;
  const StepResult& step(std::span<const int> actions) override;
  bool episode_over() const override { return !live_; }
  int steps_taken() const override { return steps_; }

 private:
  CorridorMdp mdp_;
  int max_steps_;
  int state_ = 0;
  int steps_ = 0;
  bool live_ = false;
  Rng rng_;
  StepResult result_;
};

}  // namespace pool::env
