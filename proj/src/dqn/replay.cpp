#include "pool/dqn/replay.hpp"

#include <stdexcept>

namespace pool::dqn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  ++inserted_;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer: sampling from an empty buffer");
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = static_cast<std::size_t>(rng.below(items_.size()));
  return out;
}

void ReplayBuffer::clear() {
  items_.clear();
  head_ = 0;
  inserted_ = 0;
}

}  // namespace pool::dqn
