// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any hard criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pool/dqn/learner.hpp"
#include "pool/dqn/qnet.hpp"
#include "pool/env/corridor.hpp"
#include "pool/harness/checkpoint.hpp"
#include "pool/harness/config.hpp"
#include "pool/harness/dqn_runner.hpp"
#include "pool/harness/experiment.hpp"
#include "pool/harness/metrics.hpp"
#include "pool/harness/tabular_runner.hpp"
#include "pool/medium.hpp"
#include "pool/tabular.hpp"

using namespace pool;
using namespace pool::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  bool soft = false;  // reported, but does not fail the run
  std::string detail;
  std::vector<double> numbers;  // compared bit-exactly by criterion 8
};

fs::path g_out;
const std::vector<std::uint64_t> kMazeSeeds{1, 2, 3, 4, 5};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

ExperimentConfig config_file(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
  const fs::path path = fs::path(POOL_SOURCE_DIR) / "configs" / name;
  auto text = KeyValueText::load(path);
  for (const auto& [k, v] : overrides) text.set(k, v);
  return parse_config(text, path.parent_path());
}

ExperimentConfig maze(Algorithm algo) {
  ExperimentConfig cfg = config_file("maze.txt");
  cfg.algo = algo;
  return cfg;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  int wins = 0;
  double pool_food = 0;
  std::string per_seed;
  for (auto seed : kMazeSeeds) {
    const auto p = run_tabular(maze(Algorithm::tabular_pool), seed);
    const auto q = run_tabular(maze(Algorithm::tabular_q), seed);
    const double pf = final_window_food_rate(p.records, 100), qf = final_window_food_rate(q.records, 100);
    const double pr = final_window_mean(p.records, 100), qr = final_window_mean(q.records, 100);
    pool_food += pf / kMazeSeeds.size();
    wins += (qf < pf && qr < pr) ? 1 : 0;
    o.numbers.insert(o.numbers.end(), {pf, qf, pr, qr});
    char buf[160];
    std::snprintf(buf, sizeof(buf), " [seed %llu pool food %.3f reward %.2f | q food %.3f reward %.2f]",
                  static_cast<unsigned long long>(seed), pf, pr, qf, qr);
    per_seed += buf;
  }
  o.pass = pool_food > 0.5 && wins >= 4;
  o.detail = "pool mean food " + fmt("%.3f", pool_food) + ", q strictly worse on " + std::to_string(wins) +
             "/5 seeds;" + per_seed;
  return o;
}

Outcome criterion2() {
  Outcome o;
  o.pass = true;
  for (auto seed : kMazeSeeds) {
    ExperimentConfig pool0 = maze(Algorithm::tabular_pool);
    pool0.tabular.lambda = 0.0;
    const std::string a = format_metrics(run_tabular(pool0, seed).records);
    const std::string b = format_metrics(run_tabular(maze(Algorithm::tabular_q), seed).records);
    o.pass = o.pass && a == b;
    o.numbers.push_back(static_cast<double>(std::hash<std::string>{}(a) & 0xffffffffu));
  }
  o.detail = o.pass ? "metrics.csv byte-identical on 5 seeds" : "metrics differ";
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(303);
  double decay_err = 0, perm_err = 0, mean_err = 0, std_err = 0;
  bool edges = true, touch = true;

  // decay of an empty step from a random field
  for (double beta : {0.1, 0.37, 0.5, 0.9}) {
    PheromoneField f(6, 7, 3);
    std::vector<double> init(6 * 7 * 3);
    for (auto& v : init) v = rng.uniform(-3, 3);
    f.assign(init, 0);
    for (int t = 1; t <= 60; ++t) {
      f.update({}, beta);
      touch = touch && f.cells_touched() == 42;
      const double k = std::pow(1 - beta, t);
      for (std::size_t i = 0; i < init.size(); ++i) decay_err = std::max(decay_err, std::abs(f.values()[i] - init[i] * k));
    }
  }

  auto random_batch = [&](int n) {
    DepositBatch b;
    for (int i = 0; i < n; ++i) {
      std::vector<double> q(4);
      for (auto& v : q) v = rng.uniform(-5, 5);
      append_deposits(b, q, Cell{static_cast<int>(rng.below(5)), static_cast<int>(rng.below(5))},
                      static_cast<int>(rng.below(2)), 5, 5);
    }
    return b;
  };

  // beta edges
  {
    PheromoneField f(5, 5, 4), g(5, 5, 4);
    std::vector<double> init(100);
    for (auto& v : init) v = rng.uniform(-1, 1);
    f.assign(init, 0);
    const auto batch = random_batch(6);
    f.update(batch, 0.0);
    edges = edges && std::equal(init.begin(), init.end(), f.values().begin());
    g.assign(init, 0);
    g.update(batch, 1.0);
    // beta = 1: deposited cells hold the deposit mean, the rest are zero
    std::map<std::pair<int, int>, std::pair<std::vector<double>, int>> acc;
    for (const auto& d : batch) {
      auto& e = acc[{d.cell.row, d.cell.col}];
      if (e.first.empty()) e.first.assign(4, 0.0);
      for (int a = 0; a < 4; ++a) e.first[a] += d.phe[a];
      ++e.second;
    }
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) {
        const auto it = acc.find({r, c});
        for (int a = 0; a < 4; ++a) {
          const double want = it == acc.end() ? 0.0 : it->second.first[a] / it->second.second;
          edges = edges && std::abs(g.at({r, c})[a] - want) <= 1e-15 * std::max(1.0, std::abs(want));
          if (it == acc.end()) edges = edges && g.at({r, c})[a] == 0.0;
        }
      }
    }
  }

  // permutation invariance
  for (int trial = 0; trial < 20; ++trial) {
    auto batch = random_batch(12);
    PheromoneField f(5, 5, 4), g(5, 5, 4);
    f.update(batch, 0.5);
    for (std::size_t i = batch.size(); i > 1; --i) std::swap(batch[i - 1], batch[rng.below(i)]);
    g.update(batch, 0.5);
    touch = touch && f.cells_touched() == 25;
    for (std::size_t i = 0; i < 100; ++i) perm_err = std::max(perm_err, std::abs(f.values()[i] - g.values()[i]));
  }

  // standardization
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(2 + rng.below(8));
    const double scale = std::pow(10.0, rng.uniform(-3, 4));
    for (auto& v : q) v = rng.uniform(-1, 1) * scale + rng.uniform(-100, 100);
    const auto s = standardize(q);
    double m = 0, v2 = 0;
    for (double x : s) m += x;
    m /= s.size();
    for (double x : s) v2 += (x - m) * (x - m);
    mean_err = std::max(mean_err, std::abs(m));
    std_err = std::max(std_err, std::abs(std::sqrt(v2 / s.size()) - 1.0));
  }

  o.pass = decay_err <= 1e-12 && perm_err <= 1e-12 && mean_err <= 1e-9 && std_err <= 1e-9 && edges && touch;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "decay err %.2e, permutation err %.2e, std mean err %.2e, std std err %.2e, beta edges %s, "
                "touch counter %s",
                decay_err, perm_err, mean_err, std_err, edges ? "exact" : "WRONG", touch ? "H*W" : "WRONG");
  o.detail = buf;
  o.numbers = {decay_err, perm_err, mean_err, std_err};
  return o;
}

// Flags parameters whose +-h probes put some relu on different sides.
bool crosses_kink(const dqn::QNetwork& net, const std::vector<const dqn::Transition*>& batch,
                  nn::DenseNet& layer, std::size_t k, double h) {
  auto signs = [&](double delta) {
    auto p = layer.mutable_params();
    const double orig = p[k];
    p[k] = orig + delta;
    std::vector<bool> out;
    dqn::QNetwork::Cache c;
    for (const auto* t : batch) {
      net.forward(t->obs, t->window, c);
      for (const auto* fc : {&c.receptor, &c.processor})
        for (std::size_t l = 0; l + 1 < fc->pre.size(); ++l)  // hidden layers are relu
          for (double v : fc->pre[l]) out.push_back(v > 0);
    }
    p[k] = orig;
    return out;
  };
  return signs(h) != signs(-h);
}

Outcome criterion4() {
  Outcome o;
  Rng rng(404);
  const double h = 1e-5;
  double worst = 0;
  int checked = 0, skipped = 0;
  const int configs = 12;
  for (int c = 0; c < configs; ++c) {
    dqn::LearnerConfig lc;
    lc.processor_hidden = {3 + static_cast<int>(rng.below(8)), 2 + static_cast<int>(rng.below(6))};
    lc.receptor_hidden = {2 + static_cast<int>(rng.below(5))};
    lc.receptor_out = 1 + static_cast<int>(rng.below(4));
    const int obs = 2 + static_cast<int>(rng.below(6));
    const int na = 2 + static_cast<int>(rng.below(4));
    const int radius = static_cast<int>(rng.below(2));
    const int window = (2 * radius + 1) * (2 * radius + 1) * na;
    const double gamma = rng.uniform(0.5, 0.99);
    dqn::QNetwork online(obs, window, na, lc), target(obs, window, na, lc);
    online.initialize(rng);
    target.initialize(rng);
    for (auto* net : {&online.processor(), &online.receptor()})
      for (auto& v : net->mutable_params()) v += rng.uniform(-0.05, 0.05);
    std::vector<dqn::Transition> store(6);
    for (auto& t : store) {
      t.obs.resize(obs);
      t.next_obs.resize(obs);
      t.window.resize(window);
      t.next_window.resize(window);
      for (auto* v : {&t.obs, &t.next_obs, &t.window, &t.next_window})
        for (auto& x : *v) x = rng.uniform(-1.5, 1.5);
      t.action = static_cast<int>(rng.below(na));
      t.reward = rng.uniform(-3, 3);
      t.terminal = rng.below(3) == 0;
    }
    std::vector<const dqn::Transition*> batch;
    for (const auto& t : store) batch.push_back(&t);
    auto g = online.make_gradients();
    dqn::td_loss(batch, online, target, gamma, &g);
    auto probe = [&](nn::DenseNet& layer, const std::vector<double>& grad) {
      for (std::size_t k = 0; k < layer.param_count(); ++k) {
        if (crosses_kink(online, batch, layer, k, h)) {
          ++skipped;
          continue;
        }
        auto p = layer.mutable_params();
        const double orig = p[k];
        p[k] = orig + h;
        const double lp = dqn::td_loss(batch, online, target, gamma, nullptr);
        p[k] = orig - h;
        const double lm = dqn::td_loss(batch, online, target, gamma, nullptr);
        p[k] = orig;
        const double num = (lp - lm) / (2 * h);
        worst = std::max(worst, std::abs(num - grad[k]) / std::max({std::abs(num), std::abs(grad[k]), 1e-6}));
        ++checked;
      }
    };
    probe(online.processor(), g.processor);
    probe(online.receptor(), g.receptor);
  }
  o.pass = worst < 1e-4 && checked > 0;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%d configurations, %d coordinates, max rel err %.2e (%d kink coordinates skipped)",
                configs, checked, worst, skipped);
  o.detail = buf;
  o.numbers = {worst, static_cast<double>(checked)};
  return o;
}

Outcome criterion5() {
  Outcome o;
  const int L = 8;
  const double gamma = 0.9;
  // value iteration on a hand-coded deterministic corridor
  auto step = [&](int s, int a) {
    const int n = std::clamp(s + (a == 1 ? 1 : -1), 0, L - 1);
    return std::pair<int, double>{n, n == L - 1 ? 10.0 : -1.0};
  };
  std::vector<double> v(L, 0.0);
  for (int it = 0; it < 500; ++it)
    for (int s = 0; s < L - 1; ++s) {
      double best = -1e300;
      for (int a = 0; a < 2; ++a) {
        const auto [n, r] = step(s, a);
        best = std::max(best, r + (n == L - 1 ? 0.0 : gamma * v[n]));
      }
      v[s] = best;
    }
  std::vector<int> oracle(L - 1);
  for (int s = 0; s < L - 1; ++s) {
    double qa[2];
    for (int a = 0; a < 2; ++a) {
      const auto [n, r] = step(s, a);
      qa[a] = r + (n == L - 1 ? 0.0 : gamma * v[n]);
    }
    oracle[s] = qa[1] > qa[0] ? 1 : 0;
  }
  double oracle_return = 0;
  for (int s = 0; s != L - 1;) {
    const auto [n, r] = step(s, oracle[s]);
    oracle_return += r;
    s = n;
  }
  // the simulator's tables agree with the oracle model
  bool tables = true;
  const auto mdp = env::corridor_mdp(L);
  for (int s = 0; s < L - 1; ++s)
    for (int a = 0; a < 2; ++a) {
      const auto out = mdp.outcomes(s, a);
      tables = tables && out.size() == 1 && out[0].next_state == step(s, a).first && out[0].reward == step(s, a).second;
    }

  // tabular q
  const ExperimentConfig tcfg = config_file("corridor_tabular.txt");
  const auto trun = run_tabular(tcfg, 1);
  int tab_ok = 0;
  for (int s = 0; s < L - 1; ++s) tab_ok += argmax(trun.learners.tables[0].row(s)) == oracle[s];
  const double tab_ret = eval_tabular(tcfg, trun.learners, 1, 1)[0].mean_reward;

  // plain dqn
  const ExperimentConfig dcfg = config_file("corridor_dqn.txt");
  const auto drun = run_dqn(dcfg, 1, nullptr);
  const auto& net = drun.best;
  const std::vector<double> zero(net.window_size(), 0.0);
  int dqn_ok = 0;
  for (int s = 0; s < L - 1; ++s) {
    std::vector<double> obs(L, 0.0);
    obs[s] = 1.0;
    dqn_ok += argmax(net.q_values(obs, zero)) == oracle[s];
  }
  const double dqn_ret = eval_dqn(dcfg, net, nullptr, 1, 1)[0].mean_reward;

  o.pass = tables && tab_ok == L - 1 && dqn_ok == L - 1 && tab_ret == oracle_return && dqn_ret == oracle_return;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "oracle return %.1f; tabular-q %d/%d states, return %.1f; dqn %d/%d states, return %.1f%s", oracle_return,
                tab_ok, L - 1, tab_ret, dqn_ok, L - 1, dqn_ret, tables ? "" : "; simulator tables DISAGREE");
  o.detail = buf;
  o.numbers = {oracle_return, tab_ret, dqn_ret, static_cast<double>(nn::param_hash(net.processor()) & 0xffffffffu)};
  return o;
}

struct BattleResult {
  std::vector<double> dqn, pool;
  std::uint64_t opponent_hash = 0;
  TeamRewards vs_random;
};

BattleResult battle(const std::vector<std::uint64_t>& seeds, const fs::path& dir) {
  BattleResult r;
  const ExperimentConfig sp = config_file("battle_selfplay.txt");
  const auto sp_res = selfplay_seed(sp, sp.seeds.at(0), dir / "selfplay");
  r.opponent_hash = nn::param_hash(policy_network(sp_res.checkpoint).processor());
  r.vs_random = eval_against_random(sp, policy_network(sp_res.checkpoint), 20, 1);
  const std::string opponent = (dir / "selfplay" / "checkpoint.bin").string();
  for (auto seed : seeds) {
    for (const char* algo : {"dqn", "dqn-pool"}) {
      const ExperimentConfig cfg = config_file("battle_train.txt", {{"opponent", opponent}, {"algo", algo}});
      const auto res = train_seed(cfg, seed, dir / algo / ("seed_" + std::to_string(seed)));
      const double final = final_window_mean(res.records, 100);
      (std::string(algo) == "dqn" ? r.dqn : r.pool).push_back(final);
      std::printf("  battle %s seed %llu: final-100 team reward %.4f\n", algo, static_cast<unsigned long long>(seed),
                  final);
      std::fflush(stdout);
    }
  }
  return r;
}

BattleResult g_battle;

Outcome criterion6() {
  Outcome o;
  const std::vector<std::uint64_t> seeds = config_file("battle_train.txt", {{"opponent", ""}}).seeds;
  g_battle = battle(seeds, g_out / "battle");
  int wins = 0;
  std::string per;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    wins += g_battle.pool[i] >= g_battle.dqn[i];
    char buf[96];
    std::snprintf(buf, sizeof(buf), " [seed %llu dqn %.3f pool %.3f]", static_cast<unsigned long long>(seeds[i]),
                  g_battle.dqn[i], g_battle.pool[i]);
    per += buf;
  }
  o.pass = wins >= 3;
  o.detail = "dqn-pool >= dqn on " + std::to_string(wins) + "/" + std::to_string(seeds.size()) + " seeds;" + per +
             "; opponent vs random team " + fmt("%.3f", g_battle.vs_random.team0) + " / " + fmt("%.3f", g_battle.vs_random.team1);
  o.numbers = g_battle.dqn;
  o.numbers.insert(o.numbers.end(), g_battle.pool.begin(), g_battle.pool.end());
  return o;
}

Outcome criterion7() {
  Outcome o;
  o.soft = true;
  ExperimentConfig cfg = maze(Algorithm::tabular_pool);
  cfg.seeds = kMazeSeeds;
  const auto sizes = run_sweep(cfg, SweepAxis::map_size, {6, 8, 10}, 100);
  const auto betas = run_sweep(cfg, SweepAxis::beta, {0.1, 0.5, 0.9}, 100);
  std::printf("%s%s", format_sweep(SweepAxis::map_size, sizes).c_str(), format_sweep(SweepAxis::beta, betas).c_str());
  const double ref_size = sizes[1].mean_reward, ref_beta = betas[1].mean_reward;
  bool ok = true;
  std::string diag;
  for (const auto& r : sizes) {
    const double rel = (r.mean_reward - ref_size) / std::abs(ref_size);
    ok = ok && std::abs(rel) <= 0.15;
    diag += " size " + fmt("%g", r.value) + ": " + fmt("%+.1f%%", 100 * rel);
  }
  for (const auto& r : betas) {
    const double rel = (r.mean_reward - ref_beta) / std::abs(ref_beta);
    ok = ok && std::abs(rel) <= 0.25;
    diag += " beta " + fmt("%g", r.value) + ": " + fmt("%+.1f%%", 100 * rel);
  }
  o.pass = ok;
  o.detail = "relative to size 8 / beta 0.5:" + diag;
  for (const auto* rows : {&sizes, &betas})
    for (const auto& r : *rows) o.numbers.push_back(r.mean_reward);
  return o;
}

Outcome criterion8(const std::map<int, Outcome>& first, const std::map<int, std::function<Outcome()>>& cheap) {
  Outcome o;
  std::vector<std::string> problems;
  for (const auto& [id, fn] : cheap) {
    if (!first.count(id)) continue;
    const Outcome again = fn();
    if (again.numbers != first.at(id).numbers) problems.push_back("criterion " + std::to_string(id) + " numbers changed");
  }
  if (first.count(6)) {
    // one seed pair and the opponent
    const auto again = battle({config_file("battle_train.txt", {{"opponent", ""}}).seeds.at(0)}, g_out / "battle_rerun");
    if (again.opponent_hash != g_battle.opponent_hash) problems.push_back("self-play opponent changed");
    if (again.dqn[0] != g_battle.dqn[0] || again.pool[0] != g_battle.pool[0]) problems.push_back("battle seed changed");
  }

  bool ck_ok = true;
  {
    ExperimentConfig cfg = maze(Algorithm::tabular_pool);
    cfg.episodes = 200;
    const auto res = train_seed(cfg, 3, g_out / "ck_tabular");
    const Checkpoint back = load_checkpoint(g_out / "ck_tabular" / "checkpoint.bin");
    ck_ok = ck_ok && encode_checkpoint(back) == encode_checkpoint(res.checkpoint);
    ck_ok = ck_ok && run_eval(back, cfg, 5, 11).records == run_eval(res.checkpoint, cfg, 5, 11).records;
  }
  {
    const ExperimentConfig cfg = config_file("corridor_dqn.txt", {{"algo", "dqn-pool"}, {"episodes", "60"}});
    const auto res = train_seed(cfg, 2, g_out / "ck_dqn");
    const Checkpoint back = load_checkpoint(g_out / "ck_dqn" / "checkpoint.bin");
    ck_ok = ck_ok && encode_checkpoint(back) == encode_checkpoint(res.checkpoint);
    ck_ok = ck_ok && run_eval(back, cfg, 3, 11).records == run_eval(res.checkpoint, cfg, 3, 11).records;
  }
  if (!ck_ok) problems.push_back("checkpoint round trip not bit-exact");

  o.pass = problems.empty();
  if (o.pass) {
    o.detail = "re-runs identical";
    if (first.count(6)) o.detail += " (battle: opponent and first seed pair)";
    o.detail += "; checkpoint save/load/eval bit-exact";
  } else {
    for (const auto& p : problems) o.detail += (o.detail.empty() ? "" : "; ") + p;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_out";
  app.add_option("--only", only, "run just these criteria (8 re-runs whichever ran)");
  app.add_option("--out", out, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  g_out = fs::absolute(out);
  fs::remove_all(g_out);
  fs::create_directories(g_out);

  const std::map<int, std::function<Outcome()>> cheap{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5}, {7, criterion7}};
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  std::map<int, Outcome> results;
  bool failed = false;
  auto report = [&](int id, const Outcome& o, double secs) {
    const char* tag = o.pass ? "PASS" : (o.soft ? "SOFT-FAIL" : "FAIL");
    std::printf("criterion %d: %s (%.1fs) %s\n", id, tag, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !o.soft) failed = true;
  };
  auto timed = [&](int id, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, o, secs);
    results[id] = std::move(o);
  };
  for (int id = 1; id <= 7; ++id) {
    if (!wanted(id)) continue;
    if (id == 6) timed(6, criterion6);
    else timed(id, cheap.at(id));
  }
  if (wanted(8)) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criterion8(results, cheap);
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    report(8, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return failed ? 1 : 0;
}
