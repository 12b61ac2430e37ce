#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pool/rng.hpp"

namespace pool {

/// Linear interpolation from start to end over `duration` ticks, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t duration = 1000;

  double at(std::int64_t tick) const;
};

/// argmax with lowest-index tie-break.
int argmax(std::span<const double> scores);

/// Uniform random action with probability epsilon, else argmax. Always draws
/// exactly one uniform, plus one integer when exploring.
int select_action(std::span<const double> scores, double epsilon, Rng& rng);

/// (1 - lambda) * standardize(q) + lambda * pheromone.
std::vector<double> fused_scores(std::span<const double> q, std::span<const double> pheromone,
                                 double lambda);

namespace tabular {

using Key = std::int64_t;

/// Sparse Q-table. Reads never insert; unseen keys behave as all-zero rows.
class QTable {
 public:
  QTable(int n_actions, double alpha, double gamma);

  int n_actions() const { return n_actions_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }

  std::span<const double> row(Key key) const;
  bool contains(Key key) const { return rows_.count(key) != 0; }
  std::size_t size() const { return rows_.size(); }
  const std::map<Key, std::vector<double>>& rows() const { return rows_; }

  /// Q(key,a) += alpha * (r + gamma * max Q(next) * [!terminal] - Q(key,a)).
  /// Throws std::invalid_argument on a bad action or non-finite reward.
  void td_update(Key key, int action, double reward, Key next_key, bool terminal);

  /// Throws std::invalid_argument on length mismatch or non-finite values.
  void set_row(Key key, std::span<const double> values);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  int n_actions_;
  double alpha_;
  double gamma_;
  std::map<Key, std::vector<double>> rows_;
  std::vector<double> zeros_;
};

/// standardize(Q(key, .)); zeros for unseen keys.
std::vector<double> pheromone_for_state(const QTable& table, Key key);

}  // namespace tabular
}  // namespace pool
