#pragma once

#include <cstdint>
#include <vector>

#include "pool/tabular.hpp"

namespace pool::dqn {

struct LearnerConfig {
  double gamma = 0.95;
  int batch_size = 64;
  int target_sync = 200;       // gradient steps between target copies
  int train_every = 1;         // env steps per gradient step
  int warmup = 1000;           // transitions before training starts
  int buffer_capacity = 50000;
  double learning_rate = 1e-3;
  EpsilonSchedule epsilon{1.0, 0.05, 30000};  // ticks are env steps
  std::vector<int> processor_hidden{128, 128};
  std::vector<int> receptor_hidden{32};
  int receptor_out = 16;
  bool use_pheromones = true;
  bool two_pass = false;       // re-evaluate q on the freshly committed field before acting

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

}  // namespace pool::dqn
