#pragma once

#include <cstdint>
#include <vector>

#include "pool/rng.hpp"

namespace pool::dqn {

struct Transition {
  std::vector<double> obs;
  std::vector<double> window;  // all zero when pheromones are disabled
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  std::vector<double> next_window;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 50000);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Transitions ever pushed, evicted ones included.
  std::uint64_t inserted() const { return inserted_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  /// batch indices drawn uniformly from [0, size). Throws std::logic_error
  /// on an empty buffer.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;
  void clear();

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::uint64_t inserted_ = 0;
};

}  // namespace pool::dqn
