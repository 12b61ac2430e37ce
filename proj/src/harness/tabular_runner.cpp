#include "pool/harness/tabular_runner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "pool/env/maze.hpp"

namespace pool::harness {
namespace {

EpisodeRecord run_episode(env::Environment& environment, TabularLearners& learners, PheromoneField& field,
                          const MediumConfig& medium, const ExperimentConfig& cfg, double epsilon, Rng& rng,
                          bool learn) {
  const auto start = std::chrono::steady_clock::now();
  const int n = environment.num_agents();
  const bool pool_mode = uses_pheromones(cfg.algo);
  const double lambda = cfg.tabular.lambda;

  std::vector<double> cumulative(n, 0.0);
  std::vector<int> actions(n, 0);
  std::vector<tabular::Key> keys(n, 0);
  std::vector<std::uint8_t> acted(n, 0);
  std::vector<Cell> cells(n);
  DepositBatch deposits;
  int food = 0;
  int holes = 0;

  while (!environment.episode_over()) {
    deposits.clear();
    for (int a = 0; a < n; ++a) {
      acted[a] = environment.is_live(a) ? 1 : 0;
      if (!acted[a]) continue;
      keys[a] = environment.state_key(a);
      const Cell pos = environment.position(a);
      cells[a] = world_to_cell(pos.row, pos.col, medium);
      if (pool_mode) {
        const auto q = learners.tables[learners.table_of_agent[a]].row(keys[a]);
        append_deposits(deposits, q, cells[a], medium.influence_radius, medium.grid_h, medium.grid_w);
      }
    }
    if (pool_mode) field.update(deposits, medium.beta);

    for (int a = 0; a < n; ++a) {
      if (!acted[a]) continue;
      const auto q = learners.tables[learners.table_of_agent[a]].row(keys[a]);
      if (pool_mode) {
        const auto scores = fused_scores(q, field.at(cells[a]), lambda);
        actions[a] = select_action(scores, epsilon, rng);
      } else {
        actions[a] = select_action(q, epsilon, rng);
      }
    }

    const env::StepResult& result = environment.step(actions);
    for (int a = 0; a < n; ++a) {
      if (!acted[a]) continue;
      cumulative[a] += result.reward[a];
      if (result.exit[a] == env::ExitKind::food) ++food;
      if (result.exit[a] == env::ExitKind::hole) ++holes;
      if (learn) {
        learners.tables[learners.table_of_agent[a]].td_update(keys[a], actions[a], result.reward[a],
                                                              environment.state_key(a), result.terminal(a));
      }
    }
  }

  EpisodeRecord rec;
  rec.epsilon = epsilon;
  rec.steps = environment.steps_taken();
  if (n > 0) {
    double sum = 0.0;
    rec.min_reward = std::numeric_limits<double>::infinity();
    rec.max_reward = -std::numeric_limits<double>::infinity();
    for (double c : cumulative) {
      sum += c;
      rec.min_reward = std::min(rec.min_reward, c);
      rec.max_reward = std::max(rec.max_reward, c);
    }
    rec.mean_reward = sum / n;
    rec.food_rate = static_cast<double>(food) / n;
    rec.hole_rate = static_cast<double>(holes) / n;
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

TabularLearners make_tabular_learners(const ExperimentConfig& cfg, const env::Environment& environment) {
  TabularLearners out;
  const int n = environment.num_agents();
  const int n_actions = environment.num_actions();
  out.table_of_agent.resize(n, 0);
  if (cfg.tabular.table_mode == TableMode::independent) {
    for (int a = 0; a < n; ++a) {
      out.tables.emplace_back(n_actions, cfg.tabular.alpha, cfg.tabular.gamma);
      out.table_of_agent[a] = a;
    }
    return out;
  }
  if (const auto* maze = dynamic_cast<const env::MazeEnv*>(&environment)) {
    for (std::size_t i = 0; i < maze->spec().nests.size(); ++i) {
      out.tables.emplace_back(n_actions, cfg.tabular.alpha, cfg.tabular.gamma);
    }
    for (int a = 0; a < n; ++a) out.table_of_agent[a] = maze->nest_of(a);
    return out;
  }
  out.tables.emplace_back(n_actions, cfg.tabular.alpha, cfg.tabular.gamma);
  return out;
}

TabularRun run_tabular(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!is_tabular(cfg.algo)) throw ConfigError("run_tabular: algorithm is not tabular");
  auto environment = make_environment(cfg);
  const MediumConfig medium = medium_config(cfg, *environment);
  TabularRun run;
  run.learners = make_tabular_learners(cfg, *environment);
  run.field = PheromoneField(medium);
  Rng rng(Rng::derive(seed, 0));
  run.records.reserve(cfg.episodes);
  const int w = std::max(cfg.best_window, 1);
  double window_sum = 0.0;
  double best_mean = 0.0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    environment->reset(Rng::derive(seed, 1000 + static_cast<std::uint64_t>(ep)));
    if (!cfg.persist_field) run.field.clear();
    const double eps = cfg.tabular.epsilon.at(ep);
    EpisodeRecord rec = run_episode(*environment, run.learners, run.field, medium, cfg, eps, rng, true);
    rec.episode = ep;
    run.records.push_back(rec);
    window_sum += rec.mean_reward;
    if (ep >= w) window_sum -= run.records[ep - w].mean_reward;
    if (ep + 1 >= w && (run.best_episode < 0 || window_sum / w > best_mean)) {
      best_mean = window_sum / w;
      run.best_episode = ep;
      run.best = run.learners;
    }
  }
  if (run.best_episode < 0) {
    run.best_episode = static_cast<int>(run.records.size()) - 1;
    run.best = run.learners;
  }
  return run;
}

std::vector<EpisodeRecord> eval_tabular(const ExperimentConfig& cfg, const TabularLearners& learners,
                                        int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw std::invalid_argument("eval: episodes must be positive");
  auto environment = make_environment(cfg);
  const MediumConfig medium = medium_config(cfg, *environment);
  PheromoneField field(medium);
  TabularLearners copy = learners;
  Rng rng(Rng::derive(seed, 7));
  std::vector<EpisodeRecord> out;
  for (int ep = 0; ep < episodes; ++ep) {
    environment->reset(Rng::derive(seed, 5000 + static_cast<std::uint64_t>(ep)));
    field.clear();
    EpisodeRecord rec = run_episode(*environment, copy, field, medium, cfg, 0.0, rng, false);
    rec.episode = ep;
    out.push_back(rec);
  }
  return out;
}

}  // namespace pool::harness
