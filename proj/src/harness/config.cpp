#include "pool/harness/config.hpp"

#include <algorithm>
#include <sstream>

#include "pool/env/battle.hpp"
#include "pool/env/corridor.hpp"
#include "pool/env/maze.hpp"

namespace pool::harness {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tabular_q: return "tabular-q";
    case Algorithm::tabular_pool: return "tabular-pool";
    case Algorithm::dqn: return "dqn";
    case Algorithm::dqn_pool: return "dqn-pool";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::tabular_q, Algorithm::tabular_pool, Algorithm::dqn, Algorithm::dqn_pool}) {
    if (name == algorithm_name(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "' (tabular-q, tabular-pool, dqn, dqn-pool)");
}

bool is_tabular(Algorithm a) { return a == Algorithm::tabular_q || a == Algorithm::tabular_pool; }
bool uses_pheromones(Algorithm a) { return a == Algorithm::tabular_pool || a == Algorithm::dqn_pool; }

std::string_view env_kind_name(EnvKind k) {
  switch (k) {
    case EnvKind::maze: return "maze";
    case EnvKind::corridor: return "corridor";
    case EnvKind::battle: return "battle";
  }
  return "unknown";
}

namespace {

EnvKind parse_env_kind(const std::string& name) {
  for (EnvKind k : {EnvKind::maze, EnvKind::corridor, EnvKind::battle}) {
    if (name == env_kind_name(k)) return k;
  }
  throw ConfigError("unknown env '" + name + "' (maze, corridor, battle)");
}

std::vector<int> parse_widths(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const auto v = parse_int(item, what);
    if (v <= 0) throw ConfigError(what + ": widths must be positive");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string join_widths(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "env", "env_file", "algo", "episodes", "max_steps", "seeds", "out",
      "agents_per_nest", "corridor_length", "corridor_slip",
      "grid_h", "grid_w", "beta", "perception_radius", "influence_radius", "persist_field",
      "alpha", "gamma", "eps_start", "eps_end", "eps_decay", "lambda", "table_mode",
      "batch_size", "target_sync", "train_every", "warmup", "buffer_capacity", "learning_rate",
      "processor_hidden", "receptor_hidden", "receptor_out", "two_pass",
      "opponent", "opponent_epsilon", "eval_episodes", "best_window", "record_timing"};
  return keys;
}

void ExperimentConfig::validate() const {
  if (episodes < 0) throw ConfigError("episodes must be non-negative");
  if (max_steps < 0) throw ConfigError("max_steps must be non-negative");
  if (seeds.empty()) throw ConfigError("seeds must be nonempty");
  if (agents_per_nest < 0) throw ConfigError("agents_per_nest must be non-negative");
  if (corridor_length < 2) throw ConfigError("corridor_length must be >= 2");
  if (grid_h <= 0 || grid_w <= 0) throw ConfigError("grid_h and grid_w must be positive");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0,1]");
  if (!(tabular.lambda >= 0.0 && tabular.lambda <= 1.0)) throw ConfigError("lambda must lie in [0,1]");
  if (!(tabular.alpha > 0.0 && tabular.alpha <= 1.0)) throw ConfigError("alpha must lie in (0,1]");
  if (!(opponent_epsilon >= 0.0 && opponent_epsilon <= 1.0)) throw ConfigError("opponent_epsilon must lie in [0,1]");
  if (eval_episodes < 0 || best_window <= 0) throw ConfigError("eval_episodes/best_window out of range");
  if (!env_file.empty() && !std::filesystem::exists(env_file)) {
    throw ConfigError("env_file does not exist: " + env_file.string());
  }
  if (!opponent_checkpoint.empty() && !std::filesystem::exists(opponent_checkpoint)) {
    throw ConfigError("opponent checkpoint does not exist: " + opponent_checkpoint.string());
  }
  try {
    learner.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const KeyValueText& text, const std::filesystem::path& base_dir) {
  const auto unknown = text.unknown_keys(config_keys());
  if (!unknown.empty()) throw ConfigError(text.origin() + ": unknown key '" + unknown[0] + "'");
  ExperimentConfig c;
  c.env = parse_env_kind(text.get_string("env", std::string(env_kind_name(c.env))));
  c.algo = parse_algorithm(text.get_string("algo", std::string(algorithm_name(c.algo))));
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  c.env_file = resolve(text.get_string("env_file", ""));
  c.opponent_checkpoint = resolve(text.get_string("opponent", ""));
  c.out_dir = text.get_string("out", c.out_dir.string());
  c.episodes = static_cast<int>(text.get_int("episodes", c.episodes));
  c.max_steps = static_cast<int>(text.get_int("max_steps", c.max_steps));
  c.seeds = text.get_u64s("seeds", c.seeds);
  c.agents_per_nest = static_cast<int>(text.get_int("agents_per_nest", c.agents_per_nest));
  c.corridor_length = static_cast<int>(text.get_int("corridor_length", c.corridor_length));
  c.corridor_slip = text.get_double("corridor_slip", c.corridor_slip);
  c.grid_h = static_cast<int>(text.get_int("grid_h", c.grid_h));
  c.grid_w = static_cast<int>(text.get_int("grid_w", c.grid_w));
  c.beta = text.get_double("beta", c.beta);
  c.perception_radius = static_cast<int>(text.get_int("perception_radius", c.perception_radius));
  c.influence_radius = static_cast<int>(text.get_int("influence_radius", c.influence_radius));
  c.persist_field = text.get_bool("persist_field", c.persist_field);

  // Discount and exploration keys are shared; their defaults depend on the
  // learner family.
  const bool tab = is_tabular(c.algo);
  c.tabular.alpha = text.get_double("alpha", c.tabular.alpha);
  c.tabular.lambda = text.get_double("lambda", c.tabular.lambda);
  const std::string mode = text.get_string("table_mode", "shared");
  if (mode == "shared") {
    c.tabular.table_mode = TableMode::shared;
  } else if (mode == "independent") {
    c.tabular.table_mode = TableMode::independent;
  } else {
    throw ConfigError("table_mode must be 'shared' or 'independent'");
  }
  EpsilonSchedule& eps = tab ? c.tabular.epsilon : c.learner.epsilon;
  eps.start = text.get_double("eps_start", eps.start);
  eps.end = text.get_double("eps_end", eps.end);
  eps.duration = text.get_int("eps_decay", eps.duration);
  if (tab) {
    c.tabular.gamma = text.get_double("gamma", c.tabular.gamma);
  } else {
    c.learner.gamma = text.get_double("gamma", c.learner.gamma);
  }

  auto& l = c.learner;
  l.batch_size = static_cast<int>(text.get_int("batch_size", l.batch_size));
  l.target_sync = static_cast<int>(text.get_int("target_sync", l.target_sync));
  l.train_every = static_cast<int>(text.get_int("train_every", l.train_every));
  l.warmup = static_cast<int>(text.get_int("warmup", l.warmup));
  l.buffer_capacity = static_cast<int>(text.get_int("buffer_capacity", l.buffer_capacity));
  l.learning_rate = text.get_double("learning_rate", l.learning_rate);
  if (text.has("processor_hidden")) l.processor_hidden = parse_widths(text.require_string("processor_hidden"), "processor_hidden");
  if (text.has("receptor_hidden")) l.receptor_hidden = parse_widths(text.require_string("receptor_hidden"), "receptor_hidden");
  l.receptor_out = static_cast<int>(text.get_int("receptor_out", l.receptor_out));
  l.two_pass = text.get_bool("two_pass", l.two_pass);
  l.use_pheromones = uses_pheromones(c.algo);

  c.opponent_epsilon = text.get_double("opponent_epsilon", c.opponent_epsilon);
  c.eval_episodes = static_cast<int>(text.get_int("eval_episodes", c.eval_episodes));
  c.best_window = static_cast<int>(text.get_int("best_window", c.best_window));
  c.record_timing = text.get_bool("record_timing", c.record_timing);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const auto text = KeyValueText::load(path);
  return parse_config(text, path.parent_path());
}

std::string format_config(const ExperimentConfig& c) {
  const bool tab = is_tabular(c.algo);
  const EpsilonSchedule& eps = tab ? c.tabular.epsilon : c.learner.epsilon;
  std::ostringstream o;
  o << "env = " << env_kind_name(c.env) << "\n";
  if (!c.env_file.empty()) o << "env_file = " << c.env_file.string() << "\n";
  o << "algo = " << algorithm_name(c.algo) << "\n"
    << "episodes = " << c.episodes << "\n"
    << "max_steps = " << c.max_steps << "\n"
    << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
  o << "\n"
    << "out = " << c.out_dir.string() << "\n"
    << "agents_per_nest = " << c.agents_per_nest << "\n"
    << "corridor_length = " << c.corridor_length << "\n"
    << "corridor_slip = " << fmt(c.corridor_slip) << "\n"
    << "grid_h = " << c.grid_h << "\n"
    << "grid_w = " << c.grid_w << "\n"
    << "beta = " << fmt(c.beta) << "\n"
    << "perception_radius = " << c.perception_radius << "\n"
    << "influence_radius = " << c.influence_radius << "\n"
    << "persist_field = " << (c.persist_field ? "true" : "false") << "\n"
    << "alpha = " << fmt(c.tabular.alpha) << "\n"
    << "gamma = " << fmt(tab ? c.tabular.gamma : c.learner.gamma) << "\n"
    << "eps_start = " << fmt(eps.start) << "\n"
    << "eps_end = " << fmt(eps.end) << "\n"
    << "eps_decay = " << eps.duration << "\n"
    << "lambda = " << fmt(c.tabular.lambda) << "\n"
    << "table_mode = " << (c.tabular.table_mode == TableMode::shared ? "shared" : "independent") << "\n"
    << "batch_size = " << c.learner.batch_size << "\n"
    << "target_sync = " << c.learner.target_sync << "\n"
    << "train_every = " << c.learner.train_every << "\n"
    << "warmup = " << c.learner.warmup << "\n"
    << "buffer_capacity = " << c.learner.buffer_capacity << "\n"
    << "learning_rate = " << fmt(c.learner.learning_rate) << "\n"
    << "processor_hidden = " << join_widths(c.learner.processor_hidden) << "\n"
    << "receptor_hidden = " << join_widths(c.learner.receptor_hidden) << "\n"
    << "receptor_out = " << c.learner.receptor_out << "\n"
    << "two_pass = " << (c.learner.two_pass ? "true" : "false") << "\n";
  if (!c.opponent_checkpoint.empty()) o << "opponent = " << c.opponent_checkpoint.string() << "\n";
  o << "opponent_epsilon = " << fmt(c.opponent_epsilon) << "\n"
    << "eval_episodes = " << c.eval_episodes << "\n"
    << "best_window = " << c.best_window << "\n"
    << "record_timing = " << (c.record_timing ? "true" : "false") << "\n";
  return o.str();
}

std::unique_ptr<env::Environment> make_environment(const ExperimentConfig& cfg) {
  switch (cfg.env) {
    case EnvKind::maze: {
      env::MazeSpec spec;
      if (cfg.env_file.empty()) {
        spec = env::default_maze(cfg.agents_per_nest);
      } else {
        auto text = KeyValueText::load(cfg.env_file);
        if (!text.has("agents_per_nest") && !text.has("nest_counts")) {
          text.set("agents_per_nest", std::to_string(cfg.agents_per_nest));
        }
        spec = env::parse_maze(text);
      }
      if (cfg.max_steps > 0) spec.max_steps = cfg.max_steps;
      return std::make_unique<env::MazeEnv>(std::move(spec));
    }
    case EnvKind::corridor:
      return std::make_unique<env::CorridorEnv>(env::corridor_mdp(cfg.corridor_length, cfg.corridor_slip),
                                                cfg.max_steps > 0 ? cfg.max_steps : 50);
    case EnvKind::battle: {
      env::BattleLiteSpec spec = cfg.env_file.empty() ? env::BattleLiteSpec{} : env::load_battle(cfg.env_file);
      if (cfg.max_steps > 0) spec.max_steps = cfg.max_steps;
      return std::make_unique<env::BattleLiteEnv>(std::move(spec));
    }
  }
  throw ConfigError("unknown environment kind");
}

MediumConfig medium_config(const ExperimentConfig& cfg, const env::Environment& environment) {
  MediumConfig m;
  m.world_h = environment.world_h();
  m.world_w = environment.world_w();
  m.grid_h = std::min(cfg.grid_h, m.world_h);
  m.grid_w = std::min(cfg.grid_w, m.world_w);
  m.n_actions = environment.num_actions();
  m.beta = cfg.beta;
  m.perception_radius = cfg.perception_radius;
  m.influence_radius = cfg.influence_radius;
  m.validate();
  return m;
}

}  // namespace pool::harness
