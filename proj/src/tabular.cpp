#include "pool/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pool/medium.hpp"

namespace pool {

double EpsilonSchedule::at(std::int64_t tick) const {
  if (duration <= 0 || tick >= duration) return end;
  if (tick <= 0) return start;
  const double frac = static_cast<double>(tick) / static_cast<double>(duration);
  return start + (end - start) * frac;
}

int argmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmax: empty scores");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

int select_action(std::span<const double> scores, double epsilon, Rng& rng) {
  if (scores.empty()) throw std::invalid_argument("select_action: empty scores");
  if (rng.uniform01() < epsilon) return static_cast<int>(rng.below(scores.size()));
  return argmax(scores);
}

std::vector<double> fused_scores(std::span<const double> q, std::span<const double> pheromone,
                                 double lambda) {
  if (q.size() != pheromone.size()) throw std::invalid_argument("fused_scores: length mismatch");
  std::vector<double> scores = standardize(q);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = (1.0 - lambda) * scores[i] + lambda * pheromone[i];
  }
  return scores;
}

namespace tabular {

QTable::QTable(int n_actions, double alpha, double gamma)
    : n_actions_(n_actions), alpha_(alpha), gamma_(gamma), zeros_(n_actions, 0.0) {
  if (n_actions < 1) throw std::invalid_argument("QTable: n_actions must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("QTable: alpha outside (0,1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("QTable: gamma outside [0,1]");
}

std::span<const double> QTable::row(Key key) const {
  const auto it = rows_.find(key);
  return it == rows_.end() ? std::span<const double>(zeros_) : std::span<const double>(it->second);
}

void QTable::td_update(Key key, int action, double reward, Key next_key, bool terminal) {
  if (action < 0 || action >= n_actions_) throw std::invalid_argument("td_update: action out of range");
  if (!std::isfinite(reward)) throw std::invalid_argument("td_update: non-finite reward");
  double bootstrap = 0.0;
  if (!terminal) {
    const auto next = row(next_key);
    bootstrap = *std::max_element(next.begin(), next.end());
  }
  auto [it, inserted] = rows_.try_emplace(key, zeros_);
  double& q = it->second[action];
  q += alpha_ * (reward + gamma_ * bootstrap - q);
}

void QTable::set_row(Key key, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(n_actions_)) {
    throw std::invalid_argument("QTable::set_row: length mismatch");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("QTable::set_row: non-finite value");
  }
  rows_[key].assign(values.begin(), values.end());
}

std::vector<double> pheromone_for_state(const QTable& table, Key key) {
  return standardize(table.row(key));
}

}  // namespace tabular
}  // namespace pool
