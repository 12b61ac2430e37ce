#include "pool/harness/dqn_runner.hpp"

#include <chrono>
#include <limits>

#include "pool/env/battle.hpp"
#include "pool/tabular.hpp"

namespace pool::harness {
namespace {

enum class Control { learner, opponent, random };

struct EpisodeStats {
  std::vector<double> cumulative;
  int food = 0;
  int holes = 0;
};

struct StepContext {
  env::Environment& environment;
  const MediumConfig& medium;
  PheromoneField& field;
  const std::vector<Control>& control;
  bool pool;
  bool two_pass;
  double opponent_epsilon;
};

EpisodeRecord summarize(const env::Environment& environment, const EpisodeStats& s, double epsilon,
                        std::chrono::steady_clock::time_point start) {
  EpisodeRecord rec;
  rec.epsilon = epsilon;
  rec.steps = environment.steps_taken();
  const int n = static_cast<int>(s.cumulative.size());
  if (n > 0) {
    double sum = 0.0;
    rec.min_reward = std::numeric_limits<double>::infinity();
    rec.max_reward = -std::numeric_limits<double>::infinity();
    for (double c : s.cumulative) {
      sum += c;
      rec.min_reward = std::min(rec.min_reward, c);
      rec.max_reward = std::max(rec.max_reward, c);
    }
    rec.mean_reward = sum / n;
    rec.food_rate = static_cast<double>(s.food) / n;
    rec.hole_rate = static_cast<double>(s.holes) / n;
  }
  if (const auto* battle = dynamic_cast<const env::BattleLiteEnv*>(&environment)) {
    rec.kills = battle->kills(0);
    rec.deaths = battle->deaths(0);
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// One episode. `learner` is null for evaluation; then `net` acts greedily
// with `epsilon` and nothing is stored or trained.
EpisodeRecord run_episode(StepContext& ctx, dqn::Learner* learner, const dqn::QNetwork& net,
                          const dqn::QNetwork* opponent, const dqn::LearnerConfig& lcfg, double fixed_epsilon,
                          Rng& rng, Rng& opponent_rng) {
  const auto start = std::chrono::steady_clock::now();
  env::Environment& environment = ctx.environment;
  const int n = environment.num_agents();
  const int n_actions = environment.num_actions();
  const std::size_t wsize = ctx.medium.window_size();
  const std::vector<double> zero_window(wsize, 0.0);

  std::vector<int> learners_idx;
  for (int a = 0; a < n; ++a) {
    if (ctx.control[a] == Control::learner) learners_idx.push_back(a);
  }
  EpisodeStats stats;
  stats.cumulative.assign(learners_idx.size(), 0.0);

  std::vector<std::vector<double>> obs(n), prev_obs(n);
  for (int a = 0; a < n; ++a) obs[a] = environment.observe(a);
  std::vector<int> actions(n, 0);
  std::vector<int> acting;
  std::vector<dqn::AgentInput> inputs;
  double epsilon = fixed_epsilon;

  while (!environment.episode_over()) {
    if (learner) epsilon = lcfg.epsilon.at(learner->env_steps);
    acting.clear();
    inputs.clear();
    for (int a : learners_idx) {
      if (!environment.is_live(a)) continue;
      const Cell pos = environment.position(a);
      acting.push_back(a);
      inputs.push_back({obs[a], world_to_cell(pos.row, pos.col, ctx.medium)});
    }
    auto out = dqn::act_and_deposit(net, inputs, ctx.field, ctx.medium, ctx.pool, epsilon, rng, !ctx.two_pass);
    if (ctx.pool) ctx.field.update(out.deposits, ctx.medium.beta);
    if (ctx.two_pass) {
      auto second = dqn::act_and_deposit(net, inputs, ctx.field, ctx.medium, ctx.pool, epsilon, rng, true);
      out.actions = std::move(second.actions);
      out.windows = std::move(second.windows);
    }
    for (std::size_t i = 0; i < acting.size(); ++i) actions[acting[i]] = out.actions[i];
    for (int a = 0; a < n; ++a) {
      if (ctx.control[a] == Control::learner || !environment.is_live(a)) continue;
      if (ctx.control[a] == Control::opponent && opponent) {
        const auto q = opponent->q_values(obs[a], zero_window);
        actions[a] = select_action(q, ctx.opponent_epsilon, opponent_rng);
      } else {
        actions[a] = static_cast<int>(opponent_rng.below(static_cast<std::uint64_t>(n_actions)));
      }
    }

    const env::StepResult& result = environment.step(actions);

    // inputs[i].obs still points into the swapped-out buffers
    obs.swap(prev_obs);
    for (int a = 0; a < n; ++a) obs[a] = environment.observe(a);
    for (std::size_t i = 0; i < acting.size(); ++i) {
      const int a = acting[i];
      const auto slot = static_cast<std::size_t>(
          std::lower_bound(learners_idx.begin(), learners_idx.end(), a) - learners_idx.begin());
      stats.cumulative[slot] += result.reward[a];
      if (result.exit[a] == env::ExitKind::food) ++stats.food;
      if (result.exit[a] == env::ExitKind::hole) ++stats.holes;
      if (!learner) continue;
      dqn::Transition t;
      t.obs.assign(inputs[i].obs.begin(), inputs[i].obs.end());
      t.window = std::move(out.windows[i]);
      t.action = out.actions[i];
      t.reward = result.reward[a];
      t.next_obs = obs[a];
      if (ctx.pool) {
        const Cell pos = environment.position(a);
        t.next_window = ctx.field.perceive(world_to_cell(pos.row, pos.col, ctx.medium), ctx.medium.perception_radius);
      } else {
        t.next_window = zero_window;
      }
      t.terminal = result.terminal(a);
      learner->buffer.push(std::move(t));
    }
    if (learner) {
      ++learner->env_steps;
      if (learner->env_steps % lcfg.train_every == 0) learner->train_step(rng);
    }
  }
  return summarize(environment, stats, epsilon, start);
}

std::vector<Control> control_for(const env::Environment& environment, bool selfplay) {
  std::vector<Control> c(environment.num_agents(), Control::learner);
  if (selfplay) return c;
  for (int a = 0; a < environment.num_agents(); ++a) {
    if (environment.team_of(a) != 0) c[a] = Control::opponent;
  }
  return c;
}

void train(const ExperimentConfig& cfg, std::uint64_t seed, const dqn::QNetwork* opponent, bool selfplay,
           DqnRun& run) {
  auto environment = make_environment(cfg);
  const MediumConfig medium = medium_config(cfg, *environment);
  dqn::LearnerConfig lcfg = cfg.learner;
  lcfg.use_pheromones = uses_pheromones(cfg.algo) && !selfplay;
  const bool pool = lcfg.use_pheromones;
  if (opponent && (opponent->obs_size() != static_cast<int>(environment->observation_size()) ||
                   opponent->n_actions() != environment->num_actions() ||
                   opponent->window_size() != static_cast<int>(medium.window_size()))) {
    throw ConfigError("opponent network does not match the environment");
  }

  run.records.clear();
  run.records.reserve(cfg.episodes);
  run.learner.emplace(static_cast<int>(environment->observation_size()), static_cast<int>(medium.window_size()),
                      environment->num_actions(), lcfg, Rng::derive(seed, 3));
  run.field = PheromoneField(medium);
  run.best = run.learner->online;
  run.best_episode = -1;

  const auto control = control_for(*environment, selfplay);
  StepContext ctx{*environment, medium, run.field, control, pool, lcfg.two_pass, cfg.opponent_epsilon};
  Rng rng(Rng::derive(seed, 0));
  Rng opponent_rng(Rng::derive(seed, 2));
  const int w = std::max(cfg.best_window, 1);
  double window_sum = 0.0;
  double best_mean = 0.0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    environment->reset(Rng::derive(seed, 1000 + static_cast<std::uint64_t>(ep)));
    if (!cfg.persist_field) run.field.clear();
    EpisodeRecord rec = run_episode(ctx, &*run.learner, run.learner->online, opponent, lcfg, 0.0, rng, opponent_rng);
    rec.episode = ep;
    run.records.push_back(rec);
    window_sum += rec.mean_reward;
    if (ep >= w) window_sum -= run.records[ep - w].mean_reward;
    if (ep + 1 >= w) {
      const double mean = window_sum / w;
      if (run.best_episode < 0 || mean > best_mean) {
        best_mean = mean;
        run.best_episode = ep;
        dqn::copy_into(run.best, run.learner->online);
      }
    }
  }
  if (run.best_episode < 0 && !run.records.empty()) {
    run.best_episode = static_cast<int>(run.records.size()) - 1;
    dqn::copy_into(run.best, run.learner->online);
  }
}

void check_symmetric(const env::Environment& environment) {
  if (environment.num_teams() != 2) throw ConfigError("selfplay needs a two-team environment");
  // All agents share one observation layout and action set, so the only
  // asymmetry that matters is a missing team.
  bool seen[2] = {false, false};
  for (int a = 0; a < environment.num_agents(); ++a) seen[environment.team_of(a)] = true;
  if (!seen[0] || !seen[1]) throw ConfigError("selfplay needs agents on both teams");
}

}  // namespace

void run_dqn(const ExperimentConfig& cfg, std::uint64_t seed, const dqn::QNetwork* opponent, DqnRun& run) {
  if (is_tabular(cfg.algo)) throw ConfigError("run_dqn: algorithm is tabular");
  train(cfg, seed, opponent, false, run);
}

DqnRun run_dqn(const ExperimentConfig& cfg, std::uint64_t seed, const dqn::QNetwork* opponent) {
  DqnRun run;
  run_dqn(cfg, seed, opponent, run);
  return run;
}

void run_selfplay(const ExperimentConfig& cfg, std::uint64_t seed, DqnRun& run) {
  auto environment = make_environment(cfg);
  check_symmetric(*environment);
  train(cfg, seed, nullptr, true, run);
}

DqnRun run_selfplay(const ExperimentConfig& cfg, std::uint64_t seed) {
  DqnRun run;
  run_selfplay(cfg, seed, run);
  return run;
}

std::vector<EpisodeRecord> eval_dqn(const ExperimentConfig& cfg, const dqn::QNetwork& net,
                                    const dqn::QNetwork* opponent, int episodes, std::uint64_t seed) {
  if (episodes <= 0) throw std::invalid_argument("eval: episodes must be positive");
  auto environment = make_environment(cfg);
  const MediumConfig medium = medium_config(cfg, *environment);
  if (net.obs_size() != static_cast<int>(environment->observation_size()) ||
      net.n_actions() != environment->num_actions() || net.window_size() != static_cast<int>(medium.window_size())) {
    throw std::invalid_argument("eval: checkpoint network does not match the environment");
  }
  PheromoneField field(medium);
  const auto control = control_for(*environment, false);
  StepContext ctx{*environment, medium, field, control, uses_pheromones(cfg.algo), cfg.learner.two_pass,
                  cfg.opponent_epsilon};
  Rng rng(Rng::derive(seed, 7));
  Rng opponent_rng(Rng::derive(seed, 8));
  std::vector<EpisodeRecord> out;
  for (int ep = 0; ep < episodes; ++ep) {
    environment->reset(Rng::derive(seed, 5000 + static_cast<std::uint64_t>(ep)));
    field.clear();
    EpisodeRecord rec = run_episode(ctx, nullptr, net, opponent, cfg.learner, 0.0, rng, opponent_rng);
    rec.episode = ep;
    out.push_back(rec);
  }
  return out;
}

TeamRewards eval_against_random(const ExperimentConfig& cfg, const dqn::QNetwork& net, int episodes,
                                std::uint64_t seed) {
  if (episodes <= 0) throw std::invalid_argument("eval: episodes must be positive");
  auto environment = make_environment(cfg);
  check_symmetric(*environment);
  const MediumConfig medium = medium_config(cfg, *environment);
  const std::vector<double> zero_window(medium.window_size(), 0.0);
  Rng rng(Rng::derive(seed, 9));
  const int n = environment->num_agents();
  TeamRewards total;
  int count[2] = {0, 0};
  for (int a = 0; a < n; ++a) ++count[environment->team_of(a)];
  std::vector<int> actions(n, 0);
  for (int ep = 0; ep < episodes; ++ep) {
    environment->reset(Rng::derive(seed, 6000 + static_cast<std::uint64_t>(ep)));
    double sum[2] = {0.0, 0.0};
    while (!environment->episode_over()) {
      for (int a = 0; a < n; ++a) {
        if (!environment->is_live(a)) continue;
        if (environment->team_of(a) == 0) {
          actions[a] = argmax(net.q_values(environment->observe(a), zero_window));
        } else {
          actions[a] = static_cast<int>(rng.below(static_cast<std::uint64_t>(environment->num_actions())));
        }
      }
      const auto& r = environment->step(actions);
      for (int a = 0; a < n; ++a) sum[environment->team_of(a)] += r.reward[a];
    }
    total.team0 += sum[0] / count[0];
    total.team1 += sum[1] / count[1];
  }
  total.team0 /= episodes;
  total.team1 /= episodes;
  return total;
}

}  // namespace pool::harness
