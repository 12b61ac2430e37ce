#include "pool/env/maze.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pool::env {

std::string_view exit_kind_name(ExitKind kind) {
  switch (kind) {
    case ExitKind::none: return "none";
    case ExitKind::food: return "food";
    case ExitKind::hole: return "hole";
    case ExitKind::died: return "died";
    case ExitKind::truncated: return "truncated";
  }
  return "unknown";
}

int Environment::live_count() const {
  int n = 0;
  for (int i = 0; i < num_agents(); ++i) n += is_live(i) ? 1 : 0;
  return n;
}

std::vector<double> Environment::observe(int agent) const {
  std::vector<double> out(observation_size());
  observe(agent, out);
  return out;
}

int MazeSpec::total_agents() const {
  int total = 0;
  for (const auto& n : nests) total += n.agent_count;
  return total;
}

void MazeSpec::validate() const {
  if (height <= 0 || width <= 0) throw ConfigError("maze: dimensions must be positive");
  if (tiles.size() != static_cast<std::size_t>(height) * width) {
    throw ConfigError("maze: tile count does not match dimensions");
  }
  if (nests.empty()) throw ConfigError("maze: at least one nest required");
  if (std::none_of(tiles.begin(), tiles.end(), [](Tile t) { return t == Tile::food; })) {
    throw ConfigError("maze: at least one food cell required");
  }
  for (const auto& n : nests) {
    if (!in_bounds(n.cell) || tile(n.cell) != Tile::nest) throw ConfigError("maze: nest cell invalid");
    if (n.agent_count < 0) throw ConfigError("maze: negative nest agent count");
  }
  if (max_steps <= 0) throw ConfigError("maze: max_steps must be positive");
  if (obs_radius < 0) throw ConfigError("maze: obs_radius must be non-negative");
}

MazeSpec parse_maze(const KeyValueText& text) {
  const auto unknown = text.unknown_keys(
      {"step_reward", "food_reward", "max_steps", "agents_per_nest", "nest_counts", "obs_radius"});
  if (!unknown.empty()) throw ConfigError(text.origin() + ": unknown maze key '" + unknown[0] + "'");
  const auto& rows = text.grid();
  if (rows.empty()) throw ConfigError(text.origin() + ": maze grid missing");
  MazeSpec spec;
  spec.height = static_cast<int>(rows.size());
  spec.width = static_cast<int>(rows[0].size());
  spec.step_reward = text.get_double("step_reward", spec.step_reward);
  spec.food_reward = text.get_double("food_reward", spec.food_reward);
  spec.max_steps = static_cast<int>(text.get_int("max_steps", spec.max_steps));
  spec.obs_radius = static_cast<int>(text.get_int("obs_radius", spec.obs_radius));
  const int per_nest = static_cast<int>(text.get_int("agents_per_nest", 9));
  for (int r = 0; r < spec.height; ++r) {
    if (static_cast<int>(rows[r].size()) != spec.width) {
      throw ConfigError(text.origin() + ": maze row " + std::to_string(r) + " has wrong width");
    }
    for (int c = 0; c < spec.width; ++c) {
      const char g = rows[r][c];
      switch (g) {
        case '.': spec.tiles.push_back(Tile::empty); break;
        case '#': spec.tiles.push_back(Tile::obstacle); break;
        case 'O': spec.tiles.push_back(Tile::hole); break;
        case 'F': spec.tiles.push_back(Tile::food); break;
        case 'N':
          spec.tiles.push_back(Tile::nest);
          spec.nests.push_back(Nest{Cell{r, c}, per_nest});
          break;
        default:
          throw ConfigError(text.origin() + ": unknown maze glyph '" + std::string(1, g) + "'");
      }
    }
  }
  if (text.has("nest_counts")) {
    const auto counts = text.get_u64s("nest_counts", {});
    if (counts.size() != spec.nests.size()) {
      throw ConfigError(text.origin() + ": nest_counts length does not match nest glyphs");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) spec.nests[i].agent_count = static_cast<int>(counts[i]);
  }
  spec.validate();
  return spec;
}

MazeSpec load_maze(const std::filesystem::path& path) { return parse_maze(KeyValueText::load(path)); }

std::string format_maze(const MazeSpec& spec) {
  std::ostringstream out;
  out << "step_reward = " << spec.step_reward << "\n"
      << "food_reward = " << spec.food_reward << "\n"
      << "max_steps = " << spec.max_steps << "\n"
      << "obs_radius = " << spec.obs_radius << "\n"
      << "nest_counts = ";
  for (std::size_t i = 0; i < spec.nests.size(); ++i) {
    out << (i ? "," : "") << spec.nests[i].agent_count;
  }
  out << "\ngrid:\n";
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) out << static_cast<char>(spec.tile(Cell{r, c}));
    out << "\n";
  }
  return out.str();
}

const std::string& default_maze_text() {
  static const std::string text =
      "# 16 x 24 motivation maze\n"
      "step_reward = -1.0\n"
      "food_reward = 100.0\n"
      "max_steps = 120\n"
      "agents_per_nest = 9\n"
      "grid:\n"
      "...........#############\n"
      "...........#############\n"
      "N..........#############\n"
      "...........#############\n"
      "...........#############\n"
      "...........#############\n"
      "...........#############\n"
      "N.............O#########\n"
      "...........#############\n"
      "...........#############\n"
      "...........#############\n"
      "...........#############\n"
      "N..........#############\n"
      ".......................F\n"
      "...........#############\n"
      "...........#############\n";
  return text;
}

MazeSpec default_maze(int agents_per_nest) {
  KeyValueText text = KeyValueText::parse(default_maze_text(), "<default maze>");
  text.set("agents_per_nest", std::to_string(agents_per_nest));
  return parse_maze(text);
}

MazeEnv::MazeEnv(MazeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = spec_.total_agents();
  positions_.resize(n);
  nest_of_.resize(n);
  live_.assign(n, 0);
  result_.reward.assign(n, 0.0);
  result_.exit.assign(n, ExitKind::none);
  int agent = 0;
  for (std::size_t i = 0; i < spec_.nests.size(); ++i) {
    for (int k = 0; k < spec_.nests[i].agent_count; ++k) nest_of_[agent++] = static_cast<int>(i);
  }
  over_ = true;
}

std::size_t MazeEnv::observation_size() const {
  const std::size_t side = 2 * static_cast<std::size_t>(spec_.obs_radius) + 1;
  return kNumChannels * side * side + 2;
}

void MazeEnv::reset(std::uint64_t /*seed*/) {
  // Placement is fully determined by the nests; the seed is accepted for
  // interface uniformity.
  for (int a = 0; a < num_agents(); ++a) {
    positions_[a] = spec_.nests[nest_of_[a]].cell;
    live_[a] = 1;
  }
  steps_ = 0;
  food_exits_ = 0;
  hole_exits_ = 0;
  over_ = num_agents() == 0;
}

std::int64_t MazeEnv::state_key(int agent) const {
  const Cell c = positions_[agent];
  return static_cast<std::int64_t>(c.row) * spec_.width + c.col;
}

void MazeEnv::observe(int agent, std::span<double> out) const {
  if (out.size() != observation_size()) throw std::invalid_argument("maze observe: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const int r = spec_.obs_radius;
  const int side = 2 * r + 1;
  const std::size_t plane = static_cast<std::size_t>(side) * side;
  const Cell me = positions_[agent];
  auto index = [&](int channel, int dr, int dc) {
    return channel * plane + static_cast<std::size_t>(dr + r) * side + (dc + r);
  };
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const Cell c{me.row + dr, me.col + dc};
      if (!spec_.in_bounds(c)) {
        out[index(kObstacle, dr, dc)] = 1.0;
        continue;
      }
      switch (spec_.tile(c)) {
        case Tile::obstacle: out[index(kObstacle, dr, dc)] = 1.0; break;
        case Tile::hole: out[index(kHazard, dr, dc)] = 1.0; break;
        case Tile::food: out[index(kTarget, dr, dc)] = 1.0; break;
        default: break;
      }
    }
  }
  for (int other = 0; other < num_agents(); ++other) {
    if (!live_[other]) continue;
    const int dr = positions_[other].row - me.row;
    const int dc = positions_[other].col - me.col;
    if (dr < -r || dr > r || dc < -r || dc > r) continue;
    out[index(kAlly, dr, dc)] = 1.0;  // self included: center marker
  }
  out[kNumChannels * plane] = spec_.height > 1 ? static_cast<double>(me.row) / (spec_.height - 1) : 0.0;
  out[kNumChannels * plane + 1] = spec_.width > 1 ? static_cast<double>(me.col) / (spec_.width - 1) : 0.0;
}

const StepResult& MazeEnv::step(std::span<const int> actions) {
  if (over_) throw std::logic_error("maze step: episode is over");
  if (actions.size() != positions_.size()) throw std::invalid_argument("maze step: one action per agent");
  for (int a = 0; a < num_agents(); ++a) {
    if (live_[a] && (actions[a] < 0 || actions[a] >= num_actions())) {
      throw std::invalid_argument("maze step: action id out of range");
    }
  }
  static constexpr int kDr[4] = {-1, 1, 0, 0};
  static constexpr int kDc[4] = {0, 0, -1, 1};
  std::fill(result_.reward.begin(), result_.reward.end(), 0.0);
  std::fill(result_.exit.begin(), result_.exit.end(), ExitKind::none);
  ++steps_;
  for (int a = 0; a < num_agents(); ++a) {
    if (!live_[a]) continue;
    // Each agent's move depends only on its own position and the static
    // layout, so the result is independent of iteration order.
    const Cell target{positions_[a].row + kDr[actions[a]], positions_[a].col + kDc[actions[a]]};
    if (spec_.in_bounds(target) && spec_.tile(target) != Tile::obstacle) positions_[a] = target;
    const Tile t = spec_.tile(positions_[a]);
    result_.reward[a] = spec_.step_reward;
    if (t == Tile::hole) {
      result_.exit[a] = ExitKind::hole;
      live_[a] = 0;
      ++hole_exits_;
    } else if (t == Tile::food) {
      result_.reward[a] += spec_.food_reward;
      result_.exit[a] = ExitKind::food;
      live_[a] = 0;
      ++food_exits_;
    }
  }
  if (steps_ >= spec_.max_steps) {
    for (int a = 0; a < num_agents(); ++a) {
      if (!live_[a]) continue;
      result_.exit[a] = ExitKind::truncated;
      live_[a] = 0;
    }
  }
  over_ = std::none_of(live_.begin(), live_.end(), [](std::uint8_t v) { return v != 0; });
  result_.episode_over = over_;
  return result_;
}

}  // namespace pool::env
