#include "pool/dqn/config.hpp"

#include <stdexcept>

namespace pool::dqn {

void LearnerConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("learner: gamma outside [0,1]");
  if (batch_size <= 0 || target_sync <= 0 || train_every <= 0) {
    throw std::invalid_argument("learner: batch_size, target_sync and train_every must be positive");
  }
  if (warmup < 0 || buffer_capacity <= 0) throw std::invalid_argument("learner: bad warmup or capacity");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learner: learning_rate must be positive");
  if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0 && epsilon.end >= 0.0 && epsilon.end <= 1.0)) {
    throw std::invalid_argument("learner: epsilon outside [0,1]");
  }
  if (processor_hidden.empty()) throw std::invalid_argument("learner: processor needs a hidden layer");
  for (int w : processor_hidden) {
    if (w <= 0) throw std::invalid_argument("learner: hidden widths must be positive");
  }
  for (int w : receptor_hidden) {
    if (w <= 0) throw std::invalid_argument("learner: hidden widths must be positive");
  }
  if (receptor_out <= 0) throw std::invalid_argument("learner: receptor_out must be positive");
}

}  // namespace pool::dqn
