#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pool/nn/dense.hpp"

using namespace pool;
using namespace pool::nn;

namespace {

// Plain loops over the documented parameter layout.
std::vector<double> reference_forward(const DenseNet& net, std::vector<double> x) {
  const auto p = net.params();
  for (int l = 0; l < net.num_layers(); ++l) {
    const int in = net.widths()[l], out = net.widths()[l + 1];
    std::vector<double> y(out);
    for (int o = 0; o < out; ++o) {
      long double s = p[net.bias_offset(l) + o];
      for (int i = 0; i < in; ++i) s += static_cast<long double>(p[net.weight_offset(l) + o * in + i]) * x[i];
      y[o] = static_cast<double>(s);
      if (net.activations()[l] == Activation::relu) y[o] = std::max(0.0, y[o]);
    }
    x = std::move(y);
  }
  return x;
}

double half_sq(const std::vector<double>& y, const std::vector<double>& t) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += 0.5 * (y[i] - t[i]) * (y[i] - t[i]);
  return s;
}

// True when any relu pre-activation changes sign between x+h and x-h.
bool crosses_kink(DenseNet& net, std::size_t k, double h, const std::vector<double>& x) {
  auto p = net.mutable_params();
  const double orig = p[k];
  ForwardCache a, b;
  p[k] = orig + h;
  net.forward(x, a);
  p[k] = orig - h;
  net.forward(x, b);
  p[k] = orig;
  for (int l = 0; l < net.num_layers(); ++l) {
    if (net.activations()[l] != Activation::relu) continue;
    for (std::size_t i = 0; i < a.pre[l].size(); ++i)
      if ((a.pre[l][i] > 0) != (b.pre[l][i] > 0)) return true;
  }
  return false;
}

double rel_err(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}); }

// Returns max relative error over the checked coordinates.
double gradient_check(DenseNet& net, const std::vector<double>& x, const std::vector<double>& t,
                      const std::vector<std::size_t>& coords, int* checked) {
  ForwardCache cache;
  net.forward(x, cache);
  std::vector<double> g(net.param_count(), 0.0);
  std::vector<double> gout(cache.output.size());
  for (std::size_t i = 0; i < gout.size(); ++i) gout[i] = cache.output[i] - t[i];
  net.backward(cache, gout, g);
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t k : coords) {
    if (crosses_kink(net, k, h, x)) continue;
    auto p = net.mutable_params();
    const double orig = p[k];
    p[k] = orig + h;
    const double lp = half_sq(net.forward(x), t);
    p[k] = orig - h;
    const double lm = half_sq(net.forward(x), t);
    p[k] = orig;
    worst = std::max(worst, rel_err(g[k], (lp - lm) / (2 * h)));
    ++*checked;
  }
  return worst;
}

}  // namespace

TEST_CASE("forward example by hand") {
  DenseNet net({2, 2, 1}, {Activation::relu, Activation::identity});
  auto p = net.mutable_params();
  // W0 = [[1, -1], [2, 0.5]], b0 = [0, -1], W1 = [3, -2], b1 = 0.5
  const double v[] = {1, -1, 2, 0.5, 0, -1, 3, -2, 0.5};
  std::copy(std::begin(v), std::end(v), p.begin());
  // x = [1, 2]: h = relu([-1, 2 + 1 - 1]) = [0, 2]; y = -4 + 0.5
  CHECK(net.forward(std::vector<double>{1, 2})[0] == -3.5);
  CHECK(net.param_count() == 9);
  CHECK(net.bias_offset(0) == 4);
  CHECK(net.weight_offset(1) == 6);
  CHECK_THROWS(net.forward(std::vector<double>{1}));
}

TEST_CASE("forward matches a loop reference") {
  Rng rng(4);
  const std::vector<int> hidden{7, 5};
  DenseNet net = DenseNet::mlp(6, hidden, 3);
  net.initialize(rng);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform(-2, 2);
    const auto y = net.forward(x);
    const auto r = reference_forward(net, x);
    for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(r[i]).epsilon(1e-12));
  }
}

TEST_CASE("initialization bounds and zero biases") {
  Rng rng(2);
  const std::vector<int> hidden{10};
  DenseNet net = DenseNet::mlp(20, hidden, 4);
  net.initialize(rng);
  const double b0 = std::sqrt(6.0 / 30.0), b1 = std::sqrt(6.0 / 14.0);
  const auto p = net.params();
  for (std::size_t i = 0; i < 200; ++i) CHECK(std::abs(p[i]) <= b0);
  for (std::size_t i = 200; i < 210; ++i) CHECK(p[i] == 0.0);
  for (std::size_t i = 210; i < 250; ++i) CHECK(std::abs(p[i]) <= b1);
  for (std::size_t i = 250; i < 254; ++i) CHECK(p[i] == 0.0);
  CHECK(net.param_count() == 254);
}

TEST_CASE("backward on y = w x") {
  DenseNet net({1, 1}, {Activation::identity});
  auto p = net.mutable_params();
  p[0] = 2.0;
  p[1] = 0.0;
  ForwardCache c;
  net.forward(std::vector<double>{3.0}, c);
  std::vector<double> g(2, 0.0), gi(1, 0.0);
  net.backward(c, std::vector<double>{1.0}, g, gi);
  CHECK(g[0] == 3.0);
  CHECK(g[1] == 1.0);
  CHECK(gi[0] == 2.0);
  // accumulates
  net.backward(c, std::vector<double>{1.0}, g);
  CHECK(g[0] == 6.0);
}

TEST_CASE("relu blocks gradient for negative pre-activation") {
  DenseNet net({1, 1}, {Activation::relu});
  auto p = net.mutable_params();
  p[0] = -1.0;
  p[1] = 0.0;
  ForwardCache c;
  net.forward(std::vector<double>{2.0}, c);
  CHECK(c.output[0] == 0.0);
  std::vector<double> g(2, 0.0), gi(1, 0.0);
  net.backward(c, std::vector<double>{1.0}, g, gi);
  CHECK(g == std::vector<double>{0.0, 0.0});
  CHECK(gi[0] == 0.0);
}

TEST_CASE("finite difference check, small nets, every coordinate") {
  Rng rng(21);
  int checked = 0;
  for (int draw = 0; draw < 12; ++draw) {
    const std::vector<int> hidden{4, 3};
    DenseNet net = DenseNet::mlp(5, hidden, 2);
    net.initialize(rng);
    auto p = net.mutable_params();
    for (auto& v : p) v += rng.uniform(-0.1, 0.1);  // nonzero biases too
    std::vector<double> x(5), t(2);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : t) v = rng.uniform(-1, 1);
    std::vector<std::size_t> all(net.param_count());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    CHECK(gradient_check(net, x, t, all, &checked) < 1e-5);
  }
  CHECK(checked > 300);
}

TEST_CASE("finite difference check, input gradient") {
  Rng rng(8);
  const std::vector<int> hidden{6};
  DenseNet net = DenseNet::mlp(4, hidden, 3);
  net.initialize(rng);
  for (int draw = 0; draw < 10; ++draw) {
    std::vector<double> x(4), t(3);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : t) v = rng.uniform(-1, 1);
    ForwardCache c;
    net.forward(x, c);
    std::vector<double> gout(3), g(net.param_count()), gi(4);
    for (int i = 0; i < 3; ++i) gout[i] = c.output[i] - t[i];
    net.backward(c, gout, g, gi);
    for (int i = 0; i < 4; ++i) {
      auto xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      const double n = (half_sq(net.forward(xp), t) - half_sq(net.forward(xm), t)) / 2e-6;
      CHECK(rel_err(gi[i], n) < 1e-4);
    }
  }
}

TEST_CASE("finite difference check, deep-learner architectures, sampled coordinates") {
  // processors for maze (247 + 16 inputs, 4 actions) and battle (248 + 16, 9),
  // receptors for 3x3 windows over 4 and 9 actions
  struct Arch {
    int in;
    std::vector<int> hidden;
    int out;
  };
  const std::vector<Arch> archs{{263, {128, 128}, 4}, {264, {128, 128}, 9}, {36, {32}, 16}, {81, {32}, 16}};
  Rng rng(99);
  for (const auto& a : archs) {
    int checked = 0;
    for (int draw = 0; draw < 10; ++draw) {
      DenseNet net = DenseNet::mlp(a.in, a.hidden, a.out);
      net.initialize(rng);
      std::vector<double> x(a.in), t(a.out);
      for (auto& v : x) v = rng.uniform(-1, 1);
      for (auto& v : t) v = rng.uniform(-1, 1);
      std::vector<std::size_t> coords;
      for (int i = 0; i < 30; ++i) coords.push_back(rng.below(net.param_count()));
      for (int l = 0; l < net.num_layers(); ++l) coords.push_back(net.bias_offset(l));
      CHECK(gradient_check(net, x, t, coords, &checked) < 1e-4);
    }
    CHECK(checked > 250);
  }
}

TEST_CASE("forward identity and relu examples") {
  DenseNet id({2, 2}, {Activation::identity});
  auto p = id.mutable_params();
  p[0] = 1;
  p[3] = 1;
  CHECK(id.forward(std::vector<double>{-1, 2}) == std::vector<double>{-1, 2});
  DenseNet r({2, 2}, {Activation::relu});
  auto q = r.mutable_params();
  q[0] = 1;
  q[3] = 1;
  CHECK(r.forward(std::vector<double>{-1, 2}) == std::vector<double>{0, 2});
  // forward leaves parameters alone
  const std::vector<double> before(r.params().begin(), r.params().end());
  ForwardCache c;
  r.forward(std::vector<double>{3, 4}, c);
  CHECK(std::equal(before.begin(), before.end(), r.params().begin()));
}

TEST_CASE("stale and foreign caches are rejected") {
  Rng rng(1);
  const std::vector<int> hidden{3};
  DenseNet a = DenseNet::mlp(2, hidden, 1), b = DenseNet::mlp(2, hidden, 1);
  a.initialize(rng);
  b.initialize(rng);
  ForwardCache c;
  a.forward(std::vector<double>{1, 1}, c);
  std::vector<double> g(a.param_count());
  CHECK_THROWS_AS(b.backward(c, std::vector<double>{1.0}, g), std::logic_error);
  a.mutable_params()[0] += 1;
  CHECK_THROWS_AS(a.backward(c, std::vector<double>{1.0}, g), std::logic_error);
}

TEST_CASE("adam first step against the formula") {
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Adam opt(3, lr, b1, b2, eps);
  std::vector<double> p{1.0, -2.0, 0.5}, g{0.3, -1.5, 0.0};
  std::vector<double> expect = p, m(3, 0), v(3, 0);
  for (int t = 1; t <= 3; ++t) {
    for (int i = 0; i < 3; ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(b1, t)), vh = v[i] / (1 - std::pow(b2, t));
      expect[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
    opt.step(p, g);
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  }
  CHECK(opt.steps() == 3);
  CHECK(p[2] == 0.5);
}

TEST_CASE("adam rejects non-finite gradients and sizes") {
  Adam opt(2, 1e-3);
  std::vector<double> p{0, 0};
  CHECK_THROWS_AS(opt.step(p, std::vector<double>{0.0, INFINITY}), NumericError);
  CHECK_THROWS(opt.step(p, std::vector<double>{0.0}));
}

TEST_CASE("training is deterministic and decreases loss") {
  auto train = [](std::uint64_t seed, std::vector<double>* losses) {
    Rng rng(seed);
    const std::vector<int> hidden{16};
    DenseNet net = DenseNet::mlp(2, hidden, 1);
    net.initialize(rng);
    Adam opt(net.param_count(), 1e-2);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 16; ++i) xs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (int step = 0; step < 100; ++step) {
      std::vector<double> g(net.param_count(), 0.0);
      double loss = 0;
      for (const auto& x : xs) {
        ForwardCache c;
        net.forward(x, c);
        const double t = x[0] * x[1] + 0.5 * x[0];
        const double d = c.output[0] - t;
        loss += 0.5 * d * d / xs.size();
        net.backward(c, std::vector<double>{d / xs.size()}, g);
      }
      losses->push_back(loss);
      opt.step(net, g);
    }
    return net;
  };
  std::vector<double> la, lb;
  const DenseNet a = train(5, &la), b = train(5, &lb);
  CHECK(a == b);
  CHECK(param_hash(a) == param_hash(b));
  CHECK(la == lb);
  CHECK(la.back() < 0.5 * la.front());
}

TEST_CASE("copy_into is deep and idempotent") {
  Rng rng(3);
  const std::vector<int> hidden{4};
  DenseNet a = DenseNet::mlp(3, hidden, 2), b = DenseNet::mlp(3, hidden, 2);
  a.initialize(rng);
  b.initialize(rng);
  copy_into(b, a);
  CHECK(a == b);
  copy_into(b, a);
  CHECK(a == b);
  b.mutable_params()[0] += 1.0;
  CHECK(!(a == b));
  const std::vector<int> other{5};
  DenseNet c = DenseNet::mlp(3, other, 2);
  CHECK_THROWS_AS(copy_into(c, a), std::invalid_argument);
}

TEST_CASE("weights round trip bit-exactly") {
  Rng rng(6);
  const std::vector<int> hidden{9, 4};
  DenseNet net = DenseNet::mlp(5, hidden, 3);
  net.initialize(rng);
  net.mutable_params()[3] = -0.0;
  ByteWriter w;
  net.serialize(w);
  ByteReader r(w.data());
  const DenseNet back = DenseNet::deserialize(r);
  CHECK(r.done());
  CHECK(back == net);
  CHECK(param_hash(back) == param_hash(net));
  CHECK(std::signbit(back.params()[3]));

  Adam opt(net.param_count(), 1e-3);
  std::vector<double> g(net.param_count(), 0.1);
  opt.step(net, g);
  ByteWriter w2;
  opt.serialize(w2);
  ByteReader r2(w2.data());
  CHECK(Adam::deserialize(r2) == opt);

  auto bytes = w.take();
  bytes[0] ^= 0xff;
  ByteReader bad(bytes);
  CHECK_THROWS_AS(DenseNet::deserialize(bad), FormatError);
  ByteReader truncated(std::span<const std::uint8_t>(bytes).subspan(0, 10));
  CHECK_THROWS_AS(DenseNet::deserialize(truncated), FormatError);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
  Rng rng(10);
  const std::vector<int> hidden{4};
  DenseNet net = DenseNet::mlp(3, hidden, 2);
  net.initialize(rng);
  const DenseNet before = net;
  Adam opt(net.param_count(), 1e-2);
  std::vector<double> g(net.param_count(), 0.0);
  for (int i = 0; i < 5; ++i) opt.step(net, g);
  CHECK(net == before);
}
