#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pool/env/environment.hpp"
#include "pool/kv.hpp"

namespace pool::env {

enum class Tile : char { empty = '.', obstacle = '#', hole = 'O', food = 'F', nest = 'N' };

struct Nest {
  Cell cell;
  int agent_count = 0;
};

struct MazeSpec {
  int height = 0;
  int width = 0;
  std::vector<Tile> tiles;  // row-major, nests marked as Tile::nest
  std::vector<Nest> nests;
  double step_reward = -1.0;
  double food_reward = 100.0;
  int max_steps = 120;
  int obs_radius = 3;

  Tile tile(Cell c) const { return tiles[static_cast<std::size_t>(c.row) * width + c.col]; }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  int total_agents() const;
  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Parse the ASCII maze format:
///
///   step_reward = -1.0
///   food_reward = 100.0
///   max_steps = 120
///   agents_per_nest = 9
///   grid:
///   N....#....F
///
/// Glyphs: '#' obstacle, 'O' hole, 'F' food, 'N' nest, '.' empty. Every nest
/// spawns agents_per_nest agents; "nest_counts = 9,9,9" overrides per nest in
/// row-major glyph order.
MazeSpec parse_maze(const KeyValueText& text);
MazeSpec load_maze(const std::filesystem::path& path);
std::string format_maze(const MazeSpec& spec);

/// Built-in 16 x 24 motivation layout (also shipped as
/// data/maze_default.txt). Three nests on the left edge of an open room, a
/// wall whose near gap leads to a hole three cells in, and food on the right
/// edge at the end of the corridor behind the far gap.
MazeSpec default_maze(int agents_per_nest = 9);
const std::string& default_maze_text();

/// Ant maze. Four moves (0 up, 1 down, 2 left, 3 right) applied
/// simultaneously; agents may share cells. Entering a hole exits with
/// step_reward, entering food exits with step_reward + food_reward.
class MazeEnv final : public Environment {
 public:
  enum Action : int { up = 0, down = 1, left = 2, right = 3 };

  explicit MazeEnv(MazeSpec spec);

  const MazeSpec& spec() const { return spec_; }
  int num_agents() const override { return static_cast<int>(positions_.size()); }
  int num_actions() const override { return 4; }
  std::size_t observation_size() const override;
  int world_h() const override { return spec_.height; }
  int world_w() const override { return spec_.width; }

  void reset(std::uint64_t seed) override;
  bool is_live(int agent) const override { return live_[agent] != 0; }
  Cell position(int agent) const override { return positions_[agent]; }
  std::int64_t state_key(int agent) const override;
  using Environment::observe;
  void observe(int agent, std::span<double> out) const override;
  const StepResult& step(std::span<const int> actions) override;
  bool episode_over() const override { return over_; }
  int steps_taken() const override { return steps_; }

  /// Nest index each agent spawned from.
  int nest_of(int agent) const { return nest_of_[agent]; }
  int food_count() const { return food_exits_; }
  int hole_count() const { return hole_exits_; }

 private:
  MazeSpec spec_;
  std::vector<Cell> positions_;
  std::vector<int> nest_of_;
  std::vector<std::uint8_t> live_;
  StepResult result_;
  int steps_ = 0;
  int food_exits_ = 0;
  int hole_exits_ = 0;
  bool over_ = false;
};

}  // namespace pool::env
