// pool: train, evaluate, self-play, sweep and compare from the command line.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pool/binio.hpp"
#include "pool/harness/experiment.hpp"
#include "pool/kv.hpp"
#include "pool/nn/dense.hpp"

using namespace pool;
using namespace pool::harness;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string algo;
  std::optional<int> episodes;
};

void add_common(CLI::App* cmd, Common& c, bool need_config = true) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config file");
  if (need_config) opt->required();
  cmd->add_option("--seed", c.seed, "run this seed instead of the config's seed list");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--algo", c.algo, "tabular-q, tabular-pool, dqn or dqn-pool");
  cmd->add_option("--episodes", c.episodes, "training episodes");
}

ExperimentConfig build_config(const Common& c, const std::string& text_override = {}) {
  KeyValueText text = text_override.empty() ? KeyValueText::load(c.config) : KeyValueText::parse(text_override, "<checkpoint>");
  if (!c.algo.empty()) text.set("algo", c.algo);
  if (c.episodes) text.set("episodes", std::to_string(*c.episodes));
  if (c.seed) text.set("seeds", std::to_string(*c.seed));
  if (!c.out.empty()) text.set("out", c.out);
  const std::filesystem::path base =
      text_override.empty() ? std::filesystem::path(c.config).parent_path() : std::filesystem::path{};
  return parse_config(text, base);
}

std::filesystem::path seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.out_dir / ("seed_" + std::to_string(seed));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

int cmd_train(const Common& c) {
  const ExperimentConfig cfg = build_config(c);
  for (std::uint64_t seed : cfg.seeds) {
    const auto dir = seed_dir(cfg, seed);
    const auto r = train_seed(cfg, seed, dir);
    std::printf("%s seed %llu: final-100 reward %.4f food %.4f (%s)\n", std::string(algorithm_name(cfg.algo)).c_str(),
                static_cast<unsigned long long>(seed), final_window_mean(r.records, 100),
                final_window_food_rate(r.records, 100), dir.string().c_str());
  }
  return kOk;
}

int cmd_selfplay(const Common& c) {
  const ExperimentConfig cfg = build_config(c);
  for (std::uint64_t seed : cfg.seeds) {
    const auto dir = seed_dir(cfg, seed);
    const auto r = selfplay_seed(cfg, seed, dir);
    std::printf("selfplay seed %llu: final-100 reward %.4f -> %s\n", static_cast<unsigned long long>(seed),
                final_window_mean(r.records, 100), (dir / "checkpoint.bin").string().c_str());
  }
  return kOk;
}

int cmd_eval(const Common& c, const std::string& checkpoint_path) {
  Checkpoint ck;
  try {
    ck = load_checkpoint(checkpoint_path);
  } catch (const FormatError& e) {
    throw ConfigError("checkpoint '" + checkpoint_path + "': " + e.what());
  }
  const ExperimentConfig cfg = c.config.empty() ? build_config(c, ck.config_text) : build_config(c);
  const int episodes = c.episodes ? *c.episodes : cfg.eval_episodes;
  const std::uint64_t seed = c.seed ? *c.seed : ck.seed;
  EvalSummary s;
  try {
    s = run_eval(ck, cfg, episodes, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string text = format_eval(s);
  std::fputs(text.c_str(), stdout);
  if (!c.out.empty()) {
    write_text(std::filesystem::path(c.out) / "eval_summary.txt", text);
    write_metrics(std::filesystem::path(c.out) / "eval_metrics.csv", s.records);
  }
  return kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (const auto& v : split_list(text)) out.push_back(parse_double(v, "--values"));
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

int cmd_sweep(const Common& c, const std::string& axis_text, const std::string& values_text, int window) {
  const ExperimentConfig cfg = build_config(c);
  const SweepAxis axis = parse_axis(axis_text);
  const auto rows = run_sweep(cfg, axis, parse_values(values_text), window);
  const std::string table = format_sweep(axis, rows);
  std::fputs(table.c_str(), stdout);
  write_text(cfg.out_dir / ("sweep_" + std::string(axis_name(axis)) + ".csv"), table);
  return kOk;
}

int cmd_compare(const Common& c, const std::string& baseline, int window) {
  const ExperimentConfig cfg = build_config(c);
  const Algorithm b = baseline.empty() ? counterpart(cfg.algo) : parse_algorithm(baseline);
  const auto result = run_compare(cfg, cfg.algo, b, window, cfg.out_dir);
  const std::string table = format_compare(result);
  std::fputs(table.c_str(), stdout);
  write_text(cfg.out_dir / "compare.csv", table);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pheromone-medium multi-agent reinforcement learning experiments"};
  app.require_subcommand(1);

  Common train, eval, selfplay, sweep, compare;
  std::string checkpoint, axis, values, baseline;
  int sweep_window = 100;
  int compare_window = 100;

  auto* t = app.add_subcommand("train", "train one algorithm on every configured seed");
  add_common(t, train);
  auto* e = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  add_common(e, eval, false);
  e->add_option("--checkpoint", checkpoint, "checkpoint.bin from train")->required()->check(CLI::ExistingFile);
  auto* s = app.add_subcommand("selfplay", "self-play pretraining of a battle opponent");
  add_common(s, selfplay);
  auto* w = app.add_subcommand("sweep", "final-window reward over one hyperparameter axis");
  add_common(w, sweep);
  w->add_option("--axis", axis, "beta, map_size or lambda")->required();
  w->add_option("--values", values, "comma-separated axis values")->required();
  w->add_option("--window", sweep_window, "final window length");
  auto* c = app.add_subcommand("compare", "paired comparison of two algorithms on identical seeds");
  add_common(c, compare);
  c->add_option("--baseline", baseline, "second algorithm (default: counterpart of --algo)");
  c->add_option("--window", compare_window, "final window length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(eval, checkpoint);
    if (*s) return cmd_selfplay(selfplay);
    if (*w) return cmd_sweep(sweep, axis, values, sweep_window);
    if (*c) return cmd_compare(compare, baseline, compare_window);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kConfigError;
  } catch (const nn::NumericError& err) {
    std::cerr << "numeric failure: " << err.what() << "\n";
    return kNumericError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return kOk;
}
