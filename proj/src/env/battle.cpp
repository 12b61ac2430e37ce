#include "pool/env/battle.hpp"

#include <algorithm>
#include <stdexcept>

namespace pool::env {

void BattleLiteSpec::validate() const {
  if (height <= 0 || width <= 0) throw ConfigError("battle: arena must be positive");
  if (!obstacles.empty() && obstacles.size() != static_cast<std::size_t>(height) * width) {
    throw ConfigError("battle: obstacle grid size mismatch");
  }
  if (red < 0 || blue < 0) throw ConfigError("battle: negative team size");
  if (hp0 <= 0 || attack_damage < 0) throw ConfigError("battle: hp must be positive, damage non-negative");
  if (obs_radius < 0) throw ConfigError("battle: obs_radius must be non-negative");
  if (max_steps <= 0) throw ConfigError("battle: max_steps must be positive");
  if (zone_width <= 0 || 2 * zone_width > width) throw ConfigError("battle: zone_width out of range");
}

BattleLiteSpec parse_battle(const KeyValueText& text) {
  const auto unknown = text.unknown_keys({"height", "width", "red", "blue", "hp", "damage",
                                          "attack_reward", "kill_reward", "step_reward",
                                          "death_reward", "obs_radius", "max_steps", "zone_width"});
  if (!unknown.empty()) throw ConfigError(text.origin() + ": unknown battle key '" + unknown[0] + "'");
  BattleLiteSpec s;
  s.height = static_cast<int>(text.get_int("height", s.height));
  s.width = static_cast<int>(text.get_int("width", s.width));
  if (!text.grid().empty()) {
    const auto& rows = text.grid();
    s.height = static_cast<int>(rows.size());
    s.width = static_cast<int>(rows[0].size());
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != s.width) throw ConfigError(text.origin() + ": ragged battle grid");
      for (char g : row) {
        if (g != '#' && g != '.') throw ConfigError(text.origin() + ": battle grid accepts only '#' and '.'");
        s.obstacles.push_back(g == '#' ? 1 : 0);
      }
    }
  }
  s.red = static_cast<int>(text.get_int("red", s.red));
  s.blue = static_cast<int>(text.get_int("blue", s.blue));
  s.hp0 = static_cast<int>(text.get_int("hp", s.hp0));
  s.attack_damage = static_cast<int>(text.get_int("damage", s.attack_damage));
  s.attack_reward = text.get_double("attack_reward", s.attack_reward);
  s.kill_reward = text.get_double("kill_reward", s.kill_reward);
  s.step_reward = text.get_double("step_reward", s.step_reward);
  s.death_reward = text.get_double("death_reward", s.death_reward);
  s.obs_radius = static_cast<int>(text.get_int("obs_radius", s.obs_radius));
  s.max_steps = static_cast<int>(text.get_int("max_steps", s.max_steps));
  s.zone_width = static_cast<int>(text.get_int("zone_width", s.zone_width));
  s.validate();
  return s;
}

BattleLiteSpec load_battle(const std::filesystem::path& path) {
  return parse_battle(KeyValueText::load(path));
}

BattleLiteEnv::BattleLiteEnv(BattleLiteSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = num_agents();
  positions_.resize(n);
  hp_.assign(n, 0);
  gone_.assign(n, 1);
  occupancy_.assign(static_cast<std::size_t>(spec_.height) * spec_.width, -1);
  result_.reward.assign(n, 0.0);
  result_.exit.assign(n, ExitKind::none);
}

std::size_t BattleLiteEnv::observation_size() const {
  const std::size_t side = 2 * static_cast<std::size_t>(spec_.obs_radius) + 1;
  return kNumChannels * side * side + 3;
}

void BattleLiteEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::fill(occupancy_.begin(), occupancy_.end(), -1);
  auto place_team = [&](int first, int count, int col_begin, int col_end) {
    std::vector<Cell> free;
    for (int r = 0; r < spec_.height; ++r) {
      for (int c = col_begin; c < col_end; ++c) {
        if (!spec_.obstacle(Cell{r, c})) free.push_back(Cell{r, c});
      }
    }
    if (static_cast<int>(free.size()) < count) {
      throw std::invalid_argument("battle reset: more agents than free cells in team zone");
    }
    // Partial Fisher-Yates: the first `count` entries become a uniform sample.
    for (int i = 0; i < count; ++i) {
      const auto j = i + static_cast<int>(rng.below(free.size() - i));
      std::swap(free[i], free[j]);
      positions_[first + i] = free[i];
      set_occupant(free[i], first + i);
    }
  };
  place_team(0, spec_.red, 0, spec_.zone_width);
  place_team(spec_.red, spec_.blue, spec_.width - spec_.zone_width, spec_.width);
  std::fill(hp_.begin(), hp_.end(), spec_.hp0);
  std::fill(gone_.begin(), gone_.end(), 0);
  kills_[0] = kills_[1] = 0;
  deaths_[0] = deaths_[1] = 0;
  steps_ = 0;
  last_damage_ = 0;
  over_ = team_live(0) == 0 || team_live(1) == 0;
}

int BattleLiteEnv::team_live(int team) const {
  int n = 0;
  for (int a = 0; a < num_agents(); ++a) n += (team_of(a) == team && is_live(a)) ? 1 : 0;
  return n;
}

std::int64_t BattleLiteEnv::state_key(int agent) const {
  const Cell c = positions_[agent];
  return static_cast<std::int64_t>(c.row) * spec_.width + c.col;
}

void BattleLiteEnv::observe(int agent, std::span<double> out) const {
  if (out.size() != observation_size()) throw std::invalid_argument("battle observe: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const int r = spec_.obs_radius;
  const int side = 2 * r + 1;
  const std::size_t plane = static_cast<std::size_t>(side) * side;
  const Cell me = positions_[agent];
  const int my_team = team_of(agent);
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const Cell c{me.row + dr, me.col + dc};
      const std::size_t local = static_cast<std::size_t>(dr + r) * side + (dc + r);
      if (!in_bounds(c) || spec_.obstacle(c)) {
        out[kObstacle * plane + local] = 1.0;
        continue;
      }
      const int other = occupant(c);
      if (other < 0) continue;
      if (team_of(other) == my_team) {
        out[kAlly * plane + local] = 1.0;
      } else {
        out[kEnemy * plane + local] = 1.0;
        out[kTarget * plane + local] = static_cast<double>(hp_[other]) / spec_.hp0;
      }
    }
  }
  const std::size_t self = kNumChannels * plane;
  out[self] = spec_.height > 1 ? static_cast<double>(me.row) / (spec_.height - 1) : 0.0;
  out[self + 1] = spec_.width > 1 ? static_cast<double>(me.col) / (spec_.width - 1) : 0.0;
  out[self + 2] = static_cast<double>(hp_[agent]) / spec_.hp0;
}

const StepResult& BattleLiteEnv::step(std::span<const int> actions) {
  if (over_) throw std::logic_error("battle step: episode is over");
  const int n = num_agents();
  if (static_cast<int>(actions.size()) != n) throw std::invalid_argument("battle step: one action per agent");
  for (int a = 0; a < n; ++a) {
    if (is_live(a) && (actions[a] < 0 || actions[a] >= kActions)) {
      throw std::invalid_argument("battle step: action id out of range");
    }
  }
  static constexpr int kDr[4] = {-1, 1, 0, 0};  // N S E W
  static constexpr int kDc[4] = {0, 0, 1, -1};
  std::fill(result_.reward.begin(), result_.reward.end(), 0.0);
  std::fill(result_.exit.begin(), result_.exit.end(), ExitKind::none);
  std::vector<std::uint8_t> was_live(n);
  for (int a = 0; a < n; ++a) {
    was_live[a] = is_live(a) ? 1 : 0;
    if (was_live[a]) result_.reward[a] = spec_.step_reward;
  }

  // Attacks from pre-move positions.
  std::vector<int> damage_taken(n, 0);
  std::vector<int> victim_of(n, -1);
  last_damage_ = 0;
  for (int a = 0; a < n; ++a) {
    if (!was_live[a] || actions[a] < 5) continue;
    const int dir = actions[a] - 5;
    const Cell target{positions_[a].row + kDr[dir], positions_[a].col + kDc[dir]};
    if (!in_bounds(target)) continue;
    const int victim = occupant(target);
    if (victim < 0 || team_of(victim) == team_of(a)) continue;
    damage_taken[victim] += spec_.attack_damage;
    victim_of[a] = victim;
    last_damage_ += spec_.attack_damage;
    result_.reward[a] += spec_.attack_reward;
  }
  for (int v = 0; v < n; ++v) {
    if (damage_taken[v] == 0) continue;
    hp_[v] = std::max(0, hp_[v] - damage_taken[v]);
    if (hp_[v] > 0) continue;
    result_.reward[v] += spec_.death_reward;
    result_.exit[v] = ExitKind::died;
    gone_[v] = 1;
    set_occupant(positions_[v], -1);
    ++deaths_[team_of(v)];
    ++kills_[1 - team_of(v)];
    for (int a = 0; a < n; ++a) {
      if (victim_of[a] == v) result_.reward[a] += spec_.kill_reward;
    }
  }

  // Moves in agent-id order against the evolving occupancy.
  for (int a = 0; a < n; ++a) {
    if (!is_live(a) || actions[a] < 1 || actions[a] > 4) continue;
    const int dir = actions[a] - 1;
    const Cell target{positions_[a].row + kDr[dir], positions_[a].col + kDc[dir]};
    if (!in_bounds(target) || spec_.obstacle(target) || occupant(target) >= 0) continue;
    set_occupant(positions_[a], -1);
    positions_[a] = target;
    set_occupant(target, a);
  }

  ++steps_;
  const bool team_wiped = team_live(0) == 0 || team_live(1) == 0;
  if (team_wiped || steps_ >= spec_.max_steps) {
    for (int a = 0; a < n; ++a) {
      if (!is_live(a)) continue;
      // Occupancy is kept so the final observation still shows the board.
      result_.exit[a] = ExitKind::truncated;
      gone_[a] = 1;
    }
    over_ = true;
  }
  result_.episode_over = over_;
  return result_;
}

}  // namespace pool::env
