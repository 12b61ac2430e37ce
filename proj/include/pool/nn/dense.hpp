#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pool/binio.hpp"
#include "pool/rng.hpp"

namespace pool::nn {

/// Non-finite values reached the numeric core. The CLI maps it to exit 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation : std::uint32_t { identity = 0, relu = 1 };

/// Activations and pre-activations of one forward pass. Tied to the network
/// state that produced it; backward rejects it once parameters change.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;  // input of each layer
  std::vector<std::vector<double>> pre;     // pre-activation of each layer
  std::vector<double> output;
  const void* owner = nullptr;
  std::uint64_t generation = 0;
};

/// Fully connected network. Parameters live in one flat array, per layer
/// the weights (out x in, row-major) then the biases.
class DenseNet {
 public:
  DenseNet() = default;
  /// widths has one entry more than activations.
  DenseNet(std::vector<int> widths, std::vector<Activation> activations);

  /// relu hidden layers and an identity output layer.
  static DenseNet mlp(int inputs, std::span<const int> hidden, int outputs);

  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
  void initialize(Rng& rng);

  int num_layers() const { return static_cast<int>(activations_.size()); }
  int input_size() const { return widths_.empty() ? 0 : widths_.front(); }
  int output_size() const { return widths_.empty() ? 0 : widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  const std::vector<Activation>& activations() const { return activations_; }
  std::size_t param_count() const { return params_.size(); }

  std::span<const double> params() const { return params_; }
  /// Mutable access. Invalidates outstanding caches.
  std::span<double> mutable_params() {
    ++generation_;
    return params_;
  }

  /// Offsets into params() for layer l.
  std::size_t weight_offset(int layer) const { return offsets_.at(layer); }
  std::size_t bias_offset(int layer) const {
    return offsets_.at(layer) + static_cast<std::size_t>(widths_.at(layer)) * widths_.at(layer + 1);
  }

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, ForwardCache& cache) const;

  /// Adds dLoss/dparams into grad_params (length param_count) and writes
  /// dLoss/dinput into grad_input when it is non-empty.
  void backward(const ForwardCache& cache, std::span<const double> grad_output,
                std::span<double> grad_params, std::span<double> grad_input = {}) const;

  bool same_architecture(const DenseNet& other) const {
    return widths_ == other.widths_ && activations_ == other.activations_;
  }
  std::string describe() const;

  void serialize(ByteWriter& out) const;
  static DenseNet deserialize(ByteReader& in);

  friend bool operator==(const DenseNet& a, const DenseNet& b) {
    return a.same_architecture(b) && a.params_ == b.params_;
  }

 private:
  std::vector<int> widths_;
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
  std::uint64_t generation_ = 0;
};

/// Bit-exact parameter copy. Throws std::invalid_argument on an
/// architecture mismatch.
void copy_into(DenseNet& target, const DenseNet& source);

/// FNV-1a over the parameter bit patterns.
std::uint64_t param_hash(const DenseNet& net);

/// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  /// Throws NumericError naming the first non-finite gradient entry.
  void step(std::span<double> params, std::span<const double> grads);
  void step(DenseNet& net, std::span<const double> grads) { step(net.mutable_params(), grads); }

  std::int64_t steps() const { return t_; }
  double learning_rate() const { return lr_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double epsilon() const { return epsilon_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

  void serialize(ByteWriter& out) const;
  static Adam deserialize(ByteReader& in);

  friend bool operator==(const Adam&, const Adam&) = default;

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace pool::nn
