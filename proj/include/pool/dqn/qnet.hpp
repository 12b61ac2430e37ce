#pragma once

#include <span>
#include <vector>

#include "pool/dqn/config.hpp"
#include "pool/dqn/replay.hpp"
#include "pool/nn/dense.hpp"

namespace pool::dqn {

/// Processor plus receptor. The receptor embeds the perception window; the
/// processor reads [obs, embedding] and outputs one value per action.
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(int obs_size, int window_size, int n_actions, const LearnerConfig& cfg);
  QNetwork(nn::DenseNet processor, nn::DenseNet receptor);

  void initialize(Rng& rng);

  int obs_size() const { return obs_size_; }
  int window_size() const { return receptor_.input_size(); }
  int n_actions() const { return processor_.output_size(); }
  const nn::DenseNet& processor() const { return processor_; }
  const nn::DenseNet& receptor() const { return receptor_; }
  nn::DenseNet& processor() { return processor_; }
  nn::DenseNet& receptor() { return receptor_; }

  struct Cache {
    nn::ForwardCache receptor;
    nn::ForwardCache processor;
    std::vector<double> input;  // [obs, embedding]
  };

  std::vector<double> q_values(std::span<const double> obs, std::span<const double> window) const;
  /// Values land in cache.processor.output.
  void forward(std::span<const double> obs, std::span<const double> window, Cache& cache) const;

  struct Gradients {
    std::vector<double> processor;
    std::vector<double> receptor;
    void zero();
  };
  Gradients make_gradients() const;
  /// Accumulates gradients of a loss with dLoss/dq = grad_q through both nets.
  void backward(const Cache& cache, std::span<const double> grad_q, Gradients& grads) const;

  bool same_architecture(const QNetwork& o) const {
    return processor_.same_architecture(o.processor_) && receptor_.same_architecture(o.receptor_);
  }
  friend bool operator==(const QNetwork& a, const QNetwork& b) {
    return a.processor_ == b.processor_ && a.receptor_ == b.receptor_;
  }

 private:
  void check_shapes() const;

  int obs_size_ = 0;
  nn::DenseNet processor_;
  nn::DenseNet receptor_;
};

void copy_into(QNetwork& target, const QNetwork& source);

/// Mean over the batch of (Q(obs, Rec(window), a) - y)^2 with
/// y = r + gamma * max Q_target(next_obs, Rec_target(next_window)), or y = r
/// for terminal transitions. When grads is non-null the loss gradient of the
/// online nets is added to it; targets are treated as constants. Throws
/// nn::NumericError on a non-finite loss.
double td_loss(std::span<const Transition* const> batch, const QNetwork& online, const QNetwork& target,
               double gamma, QNetwork::Gradients* grads);

}  // namespace pool::dqn
