#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pool/env/environment.hpp"
#include "pool/kv.hpp"
#include "pool/rng.hpp"

namespace pool::env {

/// Two-team melee arena. Constants are a small MAgent-flavoured surrogate.
struct BattleLiteSpec {
  int height = 24;
  int width = 24;
  std::vector<std::uint8_t> obstacles;  // row-major, empty means none
  int red = 12;
  int blue = 15;
  int hp0 = 10;
  int attack_damage = 2;
  double attack_reward = 0.2;
  double kill_reward = 5.0;
  double step_reward = -0.005;
  double death_reward = -0.1;
  int obs_radius = 3;
  int max_steps = 300;
  int zone_width = 6;  // red spawns in the leftmost columns, blue in the rightmost

  bool obstacle(Cell c) const {
    return !obstacles.empty() && obstacles[static_cast<std::size_t>(c.row) * width + c.col] != 0;
  }
  void validate() const;
};

/// Keys: height, width, red, blue, hp, damage, attack_reward, kill_reward,
/// step_reward, death_reward, obs_radius, max_steps, zone_width. An optional
/// grid block ('#' obstacle, '.' empty) fixes the arena size.
BattleLiteSpec parse_battle(const KeyValueText& text);
BattleLiteSpec load_battle(const std::filesystem::path& path);

/// Actions: 0 stay, 1-4 move N/S/E/W, 5-8 attack N/S/E/W. Agents 0..red-1
/// form team 0 (red), the rest team 1 (blue). A step resolves all attacks
/// simultaneously from pre-move positions, removes the dead, then applies
/// moves in agent-id order; a move into an occupied, blocked, or off-grid
/// cell is a no-op.
class BattleLiteEnv final : public Environment {
 public:
  static constexpr int kActions = 9;

  explicit BattleLiteEnv(BattleLiteSpec spec);

  const BattleLiteSpec& spec() const { return spec_; }
  int num_agents() const override { return spec_.red + spec_.blue; }
  int num_teams() const override { return 2; }
  int team_of(int agent) const override { return agent < spec_.red ? 0 : 1; }
  int num_actions() const override { return kActions; }
  std::size_t observation_size() const override;
  int world_h() const override { return spec_.height; }
  int world_w() const override { return spec_.width; }

  void reset(std::uint64_t seed) override;
  bool is_live(int agent) const override { return hp_[agent] > 0 && !gone_[agent]; }
  Cell position(int agent) const override { return positions_[agent]; }
  std::int64_t state_key(int agent) const override;
  using Environment::observe;
  void observe(int agent, std::span<double> out) const override;
  const StepResult& step(std::span<const int> actions) override;
  bool episode_over() const override { return over_; }
  int steps_taken() const override { return steps_; }

  int hp(int agent) const { return hp_[agent]; }
  int team_live(int team) const;
  /// Kills credited to / deaths suffered by a team since reset.
  int kills(int team) const { return kills_[team]; }
  int deaths(int team) const { return deaths_[team]; }
  /// Damage dealt in the last step (for tests).
  int last_damage_dealt() const { return last_damage_; }

 private:
  int occupant(Cell c) const { return occupancy_[static_cast<std::size_t>(c.row) * spec_.width + c.col]; }
  void set_occupant(Cell c, int agent) {
    occupancy_[static_cast<std::size_t>(c.row) * spec_.width + c.col] = agent;
  }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < spec_.height && c.col >= 0 && c.col < spec_.width;
  }

  BattleLiteSpec spec_;
  std::vector<Cell> positions_;
  std::vector<int> hp_;
  std::vector<std::uint8_t> gone_;
  std::vector<int> occupancy_;
  StepResult result_;
  int kills_[2] = {0, 0};
  int deaths_[2] = {0, 0};
  int steps_ = 0;
  int last_damage_ = 0;
  bool over_ = true;
};

}  // namespace pool::env
