#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pool/medium.hpp"

namespace pool::env {

enum class ExitKind : std::uint8_t { none, food, hole, died, truncated };

std::string_view exit_kind_name(ExitKind kind);

/// Per-step outcome for every agent slot. Slots that were already gone before
/// the step carry reward 0 and ExitKind::none.
struct StepResult {
  std::vector<double> reward;
  std::vector<ExitKind> exit;
  bool episode_over = false;

  /// Agent left the environment this step (any reason, truncation included).
  bool exited(int agent) const { return exit[agent] != ExitKind::none; }
  /// Absorbing exit: no bootstrap from the next state.
  bool terminal(int agent) const {
    const ExitKind e = exit[agent];
    return e == ExitKind::food || e == ExitKind::hole || e == ExitKind::died;
  }
};

/// Observation channel order shared by all gridworlds.
enum Channel : int { kObstacle = 0, kHazard = 1, kTarget = 2, kAlly = 3, kEnemy = 4 };
inline constexpr int kNumChannels = 5;

/// Decentralized multi-agent gridworld. Agents are fixed slots 0..n-1; team
/// membership never changes. Dynamics are deterministic given the reset seed
/// and the action sequence.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int num_agents() const = 0;
  virtual int num_teams() const { return 1; }
  virtual int team_of(int /*agent*/) const { return 0; }
  virtual int num_actions() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual int world_h() const = 0;
  virtual int world_w() const = 0;

  virtual void reset(std::uint64_t seed) = 0;
  virtual bool is_live(int agent) const = 0;
  /// World cell of a live agent.
  virtual Cell position(int agent) const = 0;
  /// Discrete state key for tabular learners.
  virtual std::int64_t state_key(int agent) const = 0;
  virtual void observe(int agent, std::span<double> out) const = 0;
  /// One action per agent slot; entries for non-live slots are ignored.
  /// Throws std::invalid_argument on an out-of-range action id.
  virtual const StepResult& step(std::span<const int> actions) = 0;
  virtual bool episode_over() const = 0;
  virtual int steps_taken() const = 0;

  int live_count() const;
  std::vector<double> observe(int agent) const;
};

}  // namespace pool::env
