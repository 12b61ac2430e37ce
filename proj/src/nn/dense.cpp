#include "pool/nn/dense.hpp"

#include <cmath>
#include <cstdio>

#include "pool/simd/kernels.hpp"

namespace pool::nn {
namespace {

constexpr std::uint32_t kNetMagic = 0x4e4e4c50;  // "PLNN"
constexpr std::uint32_t kNetVersion = 1;
constexpr std::uint32_t kAdamMagic = 0x4d444150;  // "PADM"
constexpr std::uint32_t kAdamVersion = 1;

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) + ", got " +
                                std::to_string(got));
  }
}

}  // namespace

DenseNet::DenseNet(std::vector<int> widths, std::vector<Activation> activations)
    : widths_(std::move(widths)), activations_(std::move(activations)) {
  if (widths_.size() < 2 || activations_.size() + 1 != widths_.size()) {
    throw std::invalid_argument("DenseNet: need one more width than activations");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) throw std::invalid_argument("DenseNet: widths must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(total, 0.0);
}

DenseNet DenseNet::mlp(int inputs, std::span<const int> hidden, int outputs) {
  std::vector<int> widths{inputs};
  std::vector<Activation> acts;
  for (int h : hidden) {
    widths.push_back(h);
    acts.push_back(Activation::relu);
  }
  widths.push_back(outputs);
  acts.push_back(Activation::identity);
  return DenseNet(std::move(widths), std::move(acts));
}

void DenseNet::initialize(Rng& rng) {
  ++generation_;
  for (int l = 0; l < num_layers(); ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    double* w = params_.data() + weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(in) * out; ++i) w[i] = rng.uniform(-limit, limit);
    double* b = params_.data() + bias_offset(l);
    for (int i = 0; i < out; ++i) b[i] = 0.0;
  }
}

std::vector<double> DenseNet::forward(std::span<const double> x) const {
  ForwardCache cache;
  forward(x, cache);
  return std::move(cache.output);
}

void DenseNet::forward(std::span<const double> x, ForwardCache& cache) const {
  if (widths_.empty()) throw std::logic_error("DenseNet: empty network");
  check_size(x.size(), static_cast<std::size_t>(input_size()), "DenseNet::forward input");
  const auto& k = simd::kernels();
  const int L = num_layers();
  cache.inputs.resize(L);
  cache.pre.resize(L);
  cache.inputs[0].assign(x.begin(), x.end());
  for (int l = 0; l < L; ++l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    const std::vector<double>& src = cache.inputs[l];
    std::vector<double>& z = cache.pre[l];
    z.resize(out);
    for (int o = 0; o < out; ++o) z[o] = k.dot(w + static_cast<std::size_t>(o) * in, src.data(), in) + b[o];
    std::vector<double>& dst = l + 1 < L ? cache.inputs[l + 1] : cache.output;
    dst.resize(out);
    if (activations_[l] == Activation::relu) {
      for (int o = 0; o < out; ++o) dst[o] = z[o] > 0.0 ? z[o] : 0.0;
    } else {
      for (int o = 0; o < out; ++o) dst[o] = z[o];
    }
  }
  cache.owner = this;
  cache.generation = generation_;
}

void DenseNet::backward(const ForwardCache& cache, std::span<const double> grad_output,
                        std::span<double> grad_params, std::span<double> grad_input) const {
  if (cache.owner != this || cache.generation != generation_) {
    throw std::logic_error("DenseNet::backward: stale or foreign forward cache");
  }
  check_size(grad_output.size(), static_cast<std::size_t>(output_size()), "DenseNet::backward output gradient");
  check_size(grad_params.size(), params_.size(), "DenseNet::backward parameter gradient");
  if (!grad_input.empty()) {
    check_size(grad_input.size(), static_cast<std::size_t>(input_size()), "DenseNet::backward input gradient");
  }
  const auto& k = simd::kernels();
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> next;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const int in = widths_[l];
    const int out = widths_[l + 1];
    if (activations_[l] == Activation::relu) {
      for (int o = 0; o < out; ++o) {
        if (!(cache.pre[l][o] > 0.0)) delta[o] = 0.0;
      }
    }
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad_params.data() + weight_offset(l);
    double* gb = grad_params.data() + bias_offset(l);
    const double* x = cache.inputs[l].data();
    for (int o = 0; o < out; ++o) {
      if (delta[o] == 0.0) continue;
      k.axpy(delta[o], x, gw + static_cast<std::size_t>(o) * in, in);
      gb[o] += delta[o];
    }
    if (l == 0 && grad_input.empty()) break;
    next.assign(in, 0.0);
    for (int o = 0; o < out; ++o) {
      if (delta[o] == 0.0) continue;
      k.axpy(delta[o], w + static_cast<std::size_t>(o) * in, next.data(), in);
    }
    delta.swap(next);
  }
  if (!grad_input.empty()) {
    for (std::size_t i = 0; i < grad_input.size(); ++i) grad_input[i] = delta[i];
  }
}

std::string DenseNet::describe() const {
  std::string s;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) s += activations_[i - 1] == Activation::relu ? "-relu-" : "-id-";
    s += std::to_string(widths_[i]);
  }
  return s;
}

// Layout (all little-endian):
//   u32 magic "PLNN", u32 version, u32 layer count L,
//   u32 widths[L + 1], u32 activations[L] (0 identity, 1 relu),
//   u64 parameter count P, f64 params[P] in the in-memory order.
void DenseNet::serialize(ByteWriter& out) const {
  out.u32(kNetMagic);
  out.u32(kNetVersion);
  out.u32(static_cast<std::uint32_t>(num_layers()));
  for (int w : widths_) out.u32(static_cast<std::uint32_t>(w));
  for (Activation a : activations_) out.u32(static_cast<std::uint32_t>(a));
  out.u64(params_.size());
  out.f64s(params_);
}

DenseNet DenseNet::deserialize(ByteReader& in) {
  if (in.u32() != kNetMagic) throw FormatError("network: bad magic");
  const std::uint32_t version = in.u32();
  if (version != kNetVersion) throw FormatError("network: unsupported version " + std::to_string(version));
  const std::uint32_t layers = in.u32();
  if (layers == 0 || layers > 1024) throw FormatError("network: implausible layer count");
  std::vector<int> widths(layers + 1);
  for (int& w : widths) {
    const std::uint32_t v = in.u32();
    if (v == 0 || v > (1u << 24)) throw FormatError("network: implausible width");
    w = static_cast<int>(v);
  }
  std::vector<Activation> acts(layers);
  for (Activation& a : acts) {
    const std::uint32_t v = in.u32();
    if (v > 1) throw FormatError("network: unknown activation code");
    a = static_cast<Activation>(v);
  }
  DenseNet net(std::move(widths), std::move(acts));
  if (in.u64() != net.param_count()) throw FormatError("network: parameter count does not match widths");
  in.f64s(net.params_);
  return net;
}

void copy_into(DenseNet& target, const DenseNet& source) {
  if (!target.same_architecture(source)) {
    throw std::invalid_argument("copy_into: architecture mismatch (" + target.describe() + " vs " +
                                source.describe() + ")");
  }
  auto dst = target.mutable_params();
  auto src = source.params();
  std::copy(src.begin(), src.end(), dst.begin());
}

std::uint64_t param_hash(const DenseNet& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : net.params()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(p);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(size, 0.0), v_(size, 0.0) {
  if (!(learning_rate > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(epsilon > 0.0)) {
    throw std::invalid_argument("Adam: bad hyperparameters");
  }
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  check_size(params.size(), m_.size(), "Adam::step params");
  check_size(grads.size(), m_.size(), "Adam::step grads");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "Adam::step: non-finite gradient %g at index %zu of %zu (step %lld)",
                    grads[i], i, grads.size(), static_cast<long long>(t_ + 1));
      throw NumericError(buf);
    }
  }
  ++t_;
  simd::AdamCoefficients c{lr_,
                           beta1_,
                           beta2_,
                           epsilon_,
                           1.0 - std::pow(beta1_, static_cast<double>(t_)),
                           1.0 - std::pow(beta2_, static_cast<double>(t_))};
  simd::kernels().adam(c, params.data(), grads.data(), m_.data(), v_.data(), params.size());
}

// u32 magic "PADM", u32 version, u64 step, f64 lr, beta1, beta2, epsilon,
// u64 size N, f64 m[N], f64 v[N].
void Adam::serialize(ByteWriter& out) const {
  out.u32(kAdamMagic);
  out.u32(kAdamVersion);
  out.i64(t_);
  out.f64(lr_);
  out.f64(beta1_);
  out.f64(beta2_);
  out.f64(epsilon_);
  out.u64(m_.size());
  out.f64s(m_);
  out.f64s(v_);
}

Adam Adam::deserialize(ByteReader& in) {
  if (in.u32() != kAdamMagic) throw FormatError("optimizer: bad magic");
  if (in.u32() != kAdamVersion) throw FormatError("optimizer: unsupported version");
  Adam a;
  a.t_ = in.i64();
  a.lr_ = in.f64();
  a.beta1_ = in.f64();
  a.beta2_ = in.f64();
  a.epsilon_ = in.f64();
  const std::uint64_t n = in.u64();
  if (n > in.remaining() / 16) throw FormatError("optimizer: size exceeds data");
  a.m_.resize(n);
  a.v_.resize(n);
  in.f64s(a.m_);
  in.f64s(a.v_);
  return a;
}

}  // namespace pool::nn
