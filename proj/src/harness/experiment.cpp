#include "pool/harness/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pool/env/battle.hpp"
#include "pool/harness/dqn_runner.hpp"
#include "pool/harness/tabular_runner.hpp"

namespace pool::harness {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

Checkpoint tabular_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed, const TabularRun& run) {
  Checkpoint ck;
  ck.config_text = format_config(cfg);
  ck.seed = seed;
  ck.episodes_done = static_cast<std::int64_t>(run.records.size());
  ck.tables = run.learners;
  ck.best_tables = run.best;
  ck.best_episode = run.best_episode;
  if (uses_pheromones(cfg.algo)) ck.field = run.field;
  return ck;
}

Checkpoint dqn_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed, const DqnRun& run) {
  Checkpoint ck;
  ck.config_text = format_config(cfg);
  ck.seed = seed;
  ck.episodes_done = static_cast<std::int64_t>(run.records.size());
  if (run.learner) {
    const auto& l = *run.learner;
    ck.online = l.online;
    ck.target = l.target;
    ck.processor_opt = l.processor_opt;
    ck.receptor_opt = l.receptor_opt;
    ck.buffer = BufferMeta{l.buffer.capacity(), l.buffer.size(), l.buffer.inserted()};
    ck.env_steps = l.env_steps;
    ck.grad_steps = l.grad_steps;
  }
  if (run.best_episode >= 0) ck.best = run.best;
  ck.best_episode = run.best_episode;
  if (uses_pheromones(cfg.algo)) ck.field = run.field;
  return ck;
}

void write_outputs(const ExperimentConfig& cfg, const std::filesystem::path& dir, const TrainResult& r) {
  if (dir.empty()) return;
  write_metrics(dir / "metrics.csv", r.records);
  if (cfg.record_timing) write_timing(dir / "timing.csv", r.records);
  save_checkpoint(dir / "checkpoint.bin", r.checkpoint);
  write_text(dir / "config.txt", format_config(cfg));
}

std::optional<dqn::QNetwork> load_opponent(const ExperimentConfig& cfg) {
  if (cfg.env != EnvKind::battle) return std::nullopt;
  if (cfg.opponent_checkpoint.empty()) {
    throw ConfigError("battle training needs 'opponent' (a selfplay checkpoint)");
  }
  Checkpoint ck;
  try {
    ck = load_checkpoint(cfg.opponent_checkpoint);
  } catch (const FormatError& e) {
    throw ConfigError("opponent checkpoint '" + cfg.opponent_checkpoint.string() + "': " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  if (!ck.online && !ck.best) throw ConfigError("opponent checkpoint holds no network");
  return policy_network(ck);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TrainResult train_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir) {
  TrainResult result;
  if (is_tabular(cfg.algo)) {
    TabularRun run = run_tabular(cfg, seed);
    result.records = run.records;
    result.checkpoint = tabular_checkpoint(cfg, seed, run);
  } else {
    const auto opponent = load_opponent(cfg);
    DqnRun run;
    try {
      run_dqn(cfg, seed, opponent ? &*opponent : nullptr, run);
    } catch (const nn::NumericError&) {
      if (!out_dir.empty()) {
        write_metrics(out_dir / "metrics.csv", run.records);
        save_checkpoint(out_dir / "abort_checkpoint.bin", dqn_checkpoint(cfg, seed, run));
      }
      throw;
    }
    result.records = run.records;
    result.checkpoint = dqn_checkpoint(cfg, seed, run);
  }
  write_outputs(cfg, out_dir, result);
  return result;
}

TrainResult selfplay_seed(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out_dir) {
  ExperimentConfig c = cfg;
  c.algo = Algorithm::dqn;
  c.learner.use_pheromones = false;
  DqnRun run;
  try {
    run_selfplay(c, seed, run);
  } catch (const nn::NumericError&) {
    if (!out_dir.empty()) save_checkpoint(out_dir / "abort_checkpoint.bin", dqn_checkpoint(c, seed, run));
    throw;
  }
  // Self-play rewards mix both teams, so the trailing-window "best" is not
  // meaningful; the frozen policy is the final network.
  run.best = run.learner->online;
  run.best_episode = static_cast<int>(run.records.size()) - 1;
  TrainResult result;
  result.records = run.records;
  result.checkpoint = dqn_checkpoint(c, seed, run);
  write_outputs(c, out_dir, result);
  return result;
}

const dqn::QNetwork& policy_network(const Checkpoint& ck) {
  if (ck.best) return *ck.best;
  if (ck.online) return *ck.online;
  throw std::invalid_argument("checkpoint holds no network");
}

EvalSummary summarize_eval(std::vector<EpisodeRecord> records) {
  EvalSummary s;
  s.episodes = static_cast<int>(records.size());
  if (records.empty()) return s;
  for (const auto& r : records) {
    s.mean_reward += r.mean_reward;
    s.food_rate += r.food_rate;
    s.hole_rate += r.hole_rate;
    s.kills += r.kills;
    s.deaths += r.deaths;
  }
  const double n = static_cast<double>(records.size());
  s.mean_reward /= n;
  s.food_rate /= n;
  s.hole_rate /= n;
  s.kills /= n;
  s.deaths /= n;
  double var = 0.0;
  for (const auto& r : records) var += (r.mean_reward - s.mean_reward) * (r.mean_reward - s.mean_reward);
  s.std_reward = std::sqrt(var / n);
  s.records = std::move(records);
  return s;
}

EvalSummary run_eval(const Checkpoint& ck, const ExperimentConfig& cfg, int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw std::invalid_argument("eval: episodes must be positive");
  if (is_tabular(cfg.algo)) {
    const auto& tables = ck.best_tables ? ck.best_tables : ck.tables;
    if (!tables) throw std::invalid_argument("eval: checkpoint holds no Q-tables");
    auto environment = make_environment(cfg);
    if (tables->table_of_agent.size() != static_cast<std::size_t>(environment->num_agents())) {
      throw std::invalid_argument("eval: checkpoint agent count does not match the environment");
    }
    for (const auto& t : tables->tables) {
      if (t.n_actions() != environment->num_actions()) {
        throw std::invalid_argument("eval: checkpoint action count does not match the environment");
      }
    }
    return summarize_eval(eval_tabular(cfg, *tables, episodes, seed));
  }
  if (!ck.online && !ck.best) throw std::invalid_argument("eval: checkpoint holds no network");
  const auto opponent = load_opponent(cfg);
  return summarize_eval(eval_dqn(cfg, policy_network(ck), opponent ? &*opponent : nullptr, episodes, seed));
}

std::string format_eval(const EvalSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "episodes %d\nreward %.6f +- %.6f\nfood_rate %.6f\nhole_rate %.6f\nkills %.6f\ndeaths %.6f\n",
                s.episodes, s.mean_reward, s.std_reward, s.food_rate, s.hole_rate, s.kills, s.deaths);
  return buf;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "beta") return SweepAxis::beta;
  if (name == "map_size") return SweepAxis::map_size;
  if (name == "lambda") return SweepAxis::lambda;
  throw ConfigError("unknown sweep axis '" + name + "' (beta, map_size, lambda)");
}

std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::beta: return "beta";
    case SweepAxis::map_size: return "map_size";
    case SweepAxis::lambda: return "lambda";
  }
  return "?";
}

ExperimentConfig with_axis(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig c = cfg;
  switch (axis) {
    case SweepAxis::beta:
      c.beta = value;
      break;
    case SweepAxis::map_size: {
      const int size = static_cast<int>(value);
      if (size != value || size <= 0) throw ConfigError("map_size values must be positive integers");
      c.grid_h = size;
      c.grid_w = size;
      break;
    }
    case SweepAxis::lambda:
      c.tabular.lambda = value;
      break;
  }
  c.validate();
  return c;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                                int window) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    const ExperimentConfig c = with_axis(cfg, axis, v);
    SweepRow row;
    row.value = v;
    for (std::uint64_t seed : c.seeds) {
      const auto r = train_seed(c, seed, {});
      row.final_reward.push_back(final_window_mean(r.records, window));
      row.final_food.push_back(final_window_food_rate(r.records, window));
    }
    row.mean_reward = mean_of(row.final_reward);
    row.mean_food = mean_of(row.final_food);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_sweep(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::string out = std::string(axis_name(axis)) + ",mean_final_reward,mean_final_food_rate,per_seed_rewards\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%.6f,%.6f,", r.value, r.mean_reward, r.mean_food);
    out += buf;
    for (std::size_t i = 0; i < r.final_reward.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.6f", i ? ";" : "", r.final_reward[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

Algorithm counterpart(Algorithm a) {
  switch (a) {
    case Algorithm::tabular_q: return Algorithm::tabular_pool;
    case Algorithm::tabular_pool: return Algorithm::tabular_q;
    case Algorithm::dqn: return Algorithm::dqn_pool;
    case Algorithm::dqn_pool: return Algorithm::dqn;
  }
  return a;
}

CompareResult run_compare(const ExperimentConfig& cfg, Algorithm a, Algorithm b, int window,
                          const std::filesystem::path& out_dir) {
  if (is_tabular(a) != is_tabular(b)) throw ConfigError("compare: algorithms must share a learner family");
  CompareResult result;
  result.a = a;
  result.b = b;
  ExperimentConfig ca = cfg;
  ca.algo = a;
  ca.learner.use_pheromones = uses_pheromones(a);
  ExperimentConfig cb = cfg;
  cb.algo = b;
  cb.learner.use_pheromones = uses_pheromones(b);
  for (std::uint64_t seed : cfg.seeds) {
    auto dir = [&](Algorithm x) {
      return out_dir.empty() ? std::filesystem::path{}
                             : out_dir / std::string(algorithm_name(x)) / ("seed_" + std::to_string(seed));
    };
    const auto ra = train_seed(ca, seed, dir(a));
    const auto rb = train_seed(cb, seed, dir(b));
    result.rows.push_back({seed, final_window_mean(ra.records, window), final_window_mean(rb.records, window),
                           final_window_food_rate(ra.records, window), final_window_food_rate(rb.records, window)});
  }
  return result;
}

std::string format_compare(const CompareResult& c) {
  const std::string a(algorithm_name(c.a));
  const std::string b(algorithm_name(c.b));
  std::string out = "seed,reward_" + a + ",reward_" + b + ",delta_reward,food_" + a + ",food_" + b + ",delta_food\n";
  char buf[256];
  double dr = 0.0;
  double df = 0.0;
  int wins = 0;
  for (const auto& r : c.rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", static_cast<unsigned long long>(r.seed),
                  r.reward_a, r.reward_b, r.reward_a - r.reward_b, r.food_a, r.food_b, r.food_a - r.food_b);
    out += buf;
    dr += r.reward_a - r.reward_b;
    df += r.food_a - r.food_b;
    if (r.reward_a > r.reward_b) ++wins;
  }
  if (!c.rows.empty()) {
    const double n = static_cast<double>(c.rows.size());
    std::snprintf(buf, sizeof(buf), "# mean delta_reward %.6f, mean delta_food %.6f, %s ahead on %d of %zu seeds\n",
                  dr / n, df / n, a.c_str(), wins, c.rows.size());
    out += buf;
  }
  return out;
}

}  // namespace pool::harness
