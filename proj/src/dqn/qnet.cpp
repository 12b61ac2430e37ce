#include "pool/dqn/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pool::dqn {

QNetwork::QNetwork(int obs_size, int window_size, int n_actions, const LearnerConfig& cfg)
    : obs_size_(obs_size),
      processor_(nn::DenseNet::mlp(obs_size + cfg.receptor_out, cfg.processor_hidden, n_actions)),
      receptor_(nn::DenseNet::mlp(window_size, cfg.receptor_hidden, cfg.receptor_out)) {
  if (obs_size <= 0) throw std::invalid_argument("QNetwork: observation size must be positive");
}

QNetwork::QNetwork(nn::DenseNet processor, nn::DenseNet receptor)
    : processor_(std::move(processor)), receptor_(std::move(receptor)) {
  obs_size_ = processor_.input_size() - receptor_.output_size();
  check_shapes();
}

void QNetwork::check_shapes() const {
  if (obs_size_ <= 0) throw std::invalid_argument("QNetwork: processor input narrower than the embedding");
}

void QNetwork::initialize(Rng& rng) {
  receptor_.initialize(rng);
  processor_.initialize(rng);
}

void QNetwork::forward(std::span<const double> obs, std::span<const double> window, Cache& cache) const {
  if (obs.size() != static_cast<std::size_t>(obs_size_)) {
    throw std::invalid_argument("QNetwork: observation length " + std::to_string(obs.size()) + ", expected " +
                                std::to_string(obs_size_));
  }
  if (window.size() != static_cast<std::size_t>(receptor_.input_size())) {
    throw std::invalid_argument("QNetwork: window length " + std::to_string(window.size()) + ", expected " +
                                std::to_string(receptor_.input_size()));
  }
  receptor_.forward(window, cache.receptor);
  cache.input.resize(processor_.input_size());
  std::copy(obs.begin(), obs.end(), cache.input.begin());
  std::copy(cache.receptor.output.begin(), cache.receptor.output.end(), cache.input.begin() + obs_size_);
  processor_.forward(cache.input, cache.processor);
}

std::vector<double> QNetwork::q_values(std::span<const double> obs, std::span<const double> window) const {
  Cache cache;
  forward(obs, window, cache);
  return std::move(cache.processor.output);
}

void QNetwork::Gradients::zero() {
  std::fill(processor.begin(), processor.end(), 0.0);
  std::fill(receptor.begin(), receptor.end(), 0.0);
}

QNetwork::Gradients QNetwork::make_gradients() const {
  return Gradients{std::vector<double>(processor_.param_count(), 0.0),
                   std::vector<double>(receptor_.param_count(), 0.0)};
}

void QNetwork::backward(const Cache& cache, std::span<const double> grad_q, Gradients& grads) const {
  std::vector<double> grad_input(processor_.input_size());
  processor_.backward(cache.processor, grad_q, grads.processor, grad_input);
  std::span<const double> grad_embedding(grad_input.data() + obs_size_, receptor_.output_size());
  receptor_.backward(cache.receptor, grad_embedding, grads.receptor);
}

void copy_into(QNetwork& target, const QNetwork& source) {
  nn::copy_into(target.processor(), source.processor());
  nn::copy_into(target.receptor(), source.receptor());
}

double td_loss(std::span<const Transition* const> batch, const QNetwork& online, const QNetwork& target,
               double gamma, QNetwork::Gradients* grads) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  QNetwork::Cache cache;
  std::vector<double> grad_q(online.n_actions(), 0.0);
  double loss = 0.0;
  for (const Transition* t : batch) {
    if (t->action < 0 || t->action >= online.n_actions()) throw std::invalid_argument("td_loss: action out of range");
    double y = t->reward;
    if (!t->terminal) {
      const auto next = target.q_values(t->next_obs, t->next_window);
      y += gamma * *std::max_element(next.begin(), next.end());
    }
    online.forward(t->obs, t->window, cache);
    const double diff = cache.processor.output[t->action] - y;
    loss += diff * diff;
    if (grads) {
      std::fill(grad_q.begin(), grad_q.end(), 0.0);
      grad_q[t->action] = 2.0 * diff * inv;
      online.backward(cache, grad_q, *grads);
    }
  }
  loss *= inv;
  if (!std::isfinite(loss)) throw nn::NumericError("td_loss: non-finite loss");
  return loss;
}

}  // namespace pool::dqn
