#include "pool/env/corridor.hpp"

#include <algorithm>
#include <stdexcept>

namespace pool::env {

CorridorMdp corridor_mdp(int length, double slip) {
  if (length < 2) throw std::invalid_argument("corridor_mdp: length must be >= 2");
  if (!(slip >= 0.0 && slip <= 1.0)) throw std::invalid_argument("corridor_mdp: slip outside [0,1]");
  CorridorMdp mdp;
  mdp.length = length;
  mdp.slip = slip;
  return mdp;
}

std::vector<CorridorMdp::Outcome> CorridorMdp::outcomes(int s, int a) const {
  if (s < 0 || s >= length || a < 0 || a >= n_actions) {
    throw std::invalid_argument("corridor outcomes: state or action out of range");
  }
  if (is_terminal(s)) return {};
  auto move = [&](int dir) {
    const int next = std::clamp(s + dir, 0, length - 1);
    return Outcome{next, 0.0, next == goal_state() ? goal_reward : step_reward};
  };
  const int intended = a == 1 ? 1 : -1;
  std::vector<Outcome> out;
  Outcome main = move(intended);
  main.probability = 1.0 - slip;
  if (main.probability > 0.0) out.push_back(main);
  if (slip > 0.0) {
    Outcome reversed = move(-intended);
    reversed.probability = slip;
    out.push_back(reversed);
  }
  return out;
}

CorridorEnv::CorridorEnv(CorridorMdp mdp, int max_steps) : mdp_(mdp), max_steps_(max_steps) {
  if (mdp_.length < 2) throw std::invalid_argument("CorridorEnv: length must be >= 2");
  if (max_steps_ <= 0) throw std::invalid_argument("CorridorEnv: max_steps must be positive");
  result_.reward.assign(1, 0.0);
  result_.exit.assign(1, ExitKind::none);
}

void CorridorEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = mdp_.start_state();
  steps_ = 0;
  live_ = true;
}

void CorridorEnv::observe(int /*agent*/, std::span<double> out) const {
  if (out.size() != observation_size()) throw std::invalid_argument("corridor observe: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  out[state_] = 1.0;
}

const StepResult& CorridorEnv::step(std::span<const int> actions) {
  if (!live_) throw std::logic_error("corridor step: episode is over");
  if (actions.size() != 1) throw std::invalid_argument("corridor step: one action expected");
  const int a = actions[0];
  if (a < 0 || a >= mdp_.n_actions) throw std::invalid_argument("corridor step: action id out of range");
  const auto outs = mdp_.outcomes(state_, a);
  std::size_t pick = 0;
  if (outs.size() > 1) {
    const double u = rng_.uniform01();
    pick = u < outs[0].probability ? 0 : 1;
  }
  state_ = outs[pick].next_state;
  ++steps_;
  result_.reward[0] = outs[pick].reward;
  result_.exit[0] = ExitKind::none;
  if (mdp_.is_terminal(state_)) {
    result_.exit[0] = ExitKind::food;
    live_ = false;
  } else if (steps_ >= max_steps_) {
    result_.exit[0] = ExitKind::truncated;
    live_ = false;
  }
  result_.episode_over = !live_;
  return result_;
}

}  // namespace pool::env
