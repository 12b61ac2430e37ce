#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pool/medium.hpp"
#include "pool/rng.hpp"

using namespace pool;

namespace {

MediumConfig grid(int h, int w, int n_actions, int world_h, int world_w) {
  MediumConfig c;
  c.grid_h = h;
  c.grid_w = w;
  c.n_actions = n_actions;
  c.world_h = world_h;
  c.world_w = world_w;
  return c;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double popstd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

}  // namespace

TEST_CASE("world_to_cell floors world coordinates onto the grid") {
  const auto c = grid(10, 10, 4, 200, 200);
  CHECK(world_to_cell(0, 0, c) == Cell{0, 0});
  CHECK(world_to_cell(199, 199, c) == Cell{9, 9});
  CHECK(world_to_cell(20, 0, c) == Cell{1, 0});
  CHECK(world_to_cell(19, 39, c) == Cell{0, 1});
  CHECK_THROWS_AS(world_to_cell(200, 0, c), std::out_of_range);
  CHECK_THROWS_AS(world_to_cell(0, -1, c), std::out_of_range);
}

TEST_CASE("world_to_cell covers uneven worlds without gaps") {
  const auto c = grid(8, 8, 4, 16, 24);
  std::vector<int> hits(64, 0);
  for (int x = 0; x < 16; ++x) {
    for (int y = 0; y < 24; ++y) {
      const Cell cell = world_to_cell(x, y, c);
      REQUIRE(cell.row >= 0);
      REQUIRE(cell.row < 8);
      hits[cell.row * 8 + cell.col]++;
    }
  }
  for (int h : hits) CHECK(h == 6);
}

TEST_CASE("medium config invariants") {
  auto c = grid(8, 8, 4, 16, 24);
  CHECK_NOTHROW(c.validate());
  c.grid_h = 17;
  CHECK_THROWS(c.validate());
  c = grid(8, 8, 1, 16, 24);
  CHECK_THROWS(c.validate());
  c = grid(8, 8, 4, 16, 24);
  c.beta = 1.5;
  CHECK_THROWS(c.validate());
  CHECK(grid(8, 8, 9, 24, 24).window_size() == 81);
}

TEST_CASE("standardize examples") {
  CHECK(standardize(std::vector<double>{5, 5, 5, 5}) == std::vector<double>{0, 0, 0, 0});
  const auto two = standardize(std::vector<double>{0, 1});
  CHECK(two[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-15));
  // popstd of 1..4 is sqrt(1.25)
  const auto four = standardize(std::vector<double>{1, 2, 3, 4});
  const double sd = std::sqrt(1.25);
  const double want[4] = {-1.5 / sd, -0.5 / sd, 0.5 / sd, 1.5 / sd};
  for (int i = 0; i < 4; ++i) CHECK(four[i] == doctest::Approx(want[i]).epsilon(1e-12));
  CHECK(four[0] == doctest::Approx(-1.3416).epsilon(1e-4));
  CHECK(four[1] == doctest::Approx(-0.4472).epsilon(1e-4));
  CHECK_THROWS_AS(standardize(std::vector<double>{1, NAN}), std::invalid_argument);
  CHECK_THROWS_AS(standardize(std::vector<double>{1, INFINITY}), std::invalid_argument);
}

TEST_CASE("standardize yields zero mean, unit std and affine invariance") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(2 + trial % 9);
    for (auto& x : q) x = rng.uniform(-50, 50);
    const auto s = standardize(q);
    CHECK(std::abs(mean(s)) < 1e-9);
    CHECK(std::abs(popstd(s) - 1.0) < 1e-9);
    const double a = rng.uniform(0.1, 10), b = rng.uniform(-5, 5);
    std::vector<double> t(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) t[i] = a * q[i] + b;
    const auto st = standardize(t);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(st[i] - s[i]) < 1e-9);
    CHECK(std::max_element(st.begin(), st.end()) - st.begin() == std::max_element(q.begin(), q.end()) - q.begin());
  }
}

TEST_CASE("deposit_for_agent copies the standardized vector over the influence domain") {
  const auto one = deposit_for_agent(std::vector<double>{1, 2}, {3, 3}, 0, 8, 8);
  REQUIRE(one.size() == 1);
  CHECK(one[0].cell == Cell{3, 3});
  CHECK(one[0].phe[0] == doctest::Approx(-1.0));
  CHECK(one[0].phe[1] == doctest::Approx(1.0));
  const auto flat = deposit_for_agent(std::vector<double>{2, 2}, {1, 5}, 0, 8, 8);
  CHECK(flat[0].phe == std::vector<double>{0, 0});
  CHECK(deposit_for_agent(std::vector<double>{1, 2}, {0, 0}, 1, 8, 8).size() == 4);
  CHECK(deposit_for_agent(std::vector<double>{1, 2}, {4, 4}, 1, 8, 8).size() == 9);
  CHECK(deposit_for_agent(std::vector<double>{1, 2}, {7, 4}, 2, 8, 8).size() == 15);
}

TEST_CASE("field update examples") {
  SUBCASE("single deposit on an empty field") {
    PheromoneField f(1, 1, 3);
    f.update(std::vector<Deposit>{{{0, 0}, {1, 0, -1}}}, 0.5);
    CHECK(std::vector<double>(f.at({0, 0}).begin(), f.at({0, 0}).end()) == std::vector<double>{0.5, 0, -0.5});
  }
  SUBCASE("evaporation without deposits") {
    PheromoneField f(1, 1, 2);
    f.assign(std::vector<double>{2, 2}, 0);
    f.update({}, 0.5);
    CHECK(f.values()[0] == 1.0);
    CHECK(f.values()[1] == 1.0);
  }
  SUBCASE("two deposits in one cell are averaged") {
    PheromoneField f(2, 2, 2);
    f.update(std::vector<Deposit>{{{1, 0}, {1, 1}}, {{1, 0}, {3, -1}}}, 0.5);
    CHECK(f.at({1, 0})[0] == 1.0);
    CHECK(f.at({1, 0})[1] == 0.0);
    CHECK(f.at({0, 0})[0] == 0.0);
  }
  SUBCASE("out-of-range deposits are rejected") {
    PheromoneField f(2, 2, 2);
    CHECK_THROWS(f.update(std::vector<Deposit>{{{2, 0}, {1, 1}}}, 0.5));
    CHECK_THROWS(f.update(std::vector<Deposit>{{{0, 0}, {1, 1, 1}}}, 0.5));
  }
}

TEST_CASE("empty-field decay matches the closed form") {
  Rng rng(4);
  PheromoneField f(5, 6, 3);
  std::vector<double> init(5 * 6 * 3);
  for (auto& v : init) v = rng.uniform(-3, 3);
  f.assign(init, 0);
  for (double beta : {0.1, 0.5, 0.9}) {
    f.assign(init, 0);
    for (int t = 1; t <= 40; ++t) {
      f.update({}, beta);
      const double factor = std::pow(1.0 - beta, t);
      double worst = 0;
      for (std::size_t i = 0; i < init.size(); ++i) worst = std::max(worst, std::abs(f.values()[i] - factor * init[i]));
      CHECK(worst < 1e-12);
    }
    CHECK(f.step_counter() == 40);
  }
}

TEST_CASE("beta edge cases are exact") {
  Rng rng(8);
  PheromoneField f(3, 3, 2);
  std::vector<double> init(18);
  for (auto& v : init) v = rng.uniform(-1, 1);
  f.assign(init, 0);
  std::vector<Deposit> d{{{1, 1}, {0.3, -0.3}}, {{1, 1}, {-1, 1}}, {{0, 2}, {0.25, -0.25}}};
  f.update(d, 0.0);
  CHECK(std::vector<double>(f.values().begin(), f.values().end()) == init);
  f.update(d, 1.0);
  CHECK(f.at({1, 1})[0] == (0.3 + -1.0) / 2);
  CHECK(f.at({1, 1})[1] == (-0.3 + 1.0) / 2);
  CHECK(f.at({0, 2})[0] == 0.25);
  CHECK(f.at({0, 0})[0] == 0.0);
}

TEST_CASE("deposit order does not change the update") {
  Rng rng(21);
  std::vector<Deposit> d;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> q(4);
    for (auto& x : q) x = rng.uniform(-5, 5);
    d.push_back({{static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3))}, standardize(q)});
  }
  PheromoneField a(3, 3, 4), b(3, 3, 4);
  a.update(d, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = d.size() - 1; i > 0; --i) std::swap(d[i], d[rng.below(i + 1)]);
    b.clear();
    b.update(d, 0.5);
    for (std::size_t i = 0; i < a.values().size(); ++i) CHECK(std::abs(a.values()[i] - b.values()[i]) <= 1e-12);
  }
}

TEST_CASE("touch counter reports every cell once per update") {
  PheromoneField f(7, 5, 3);
  f.update({}, 0.5);
  CHECK(f.cells_touched() == 35);
  f.update(std::vector<Deposit>{{{0, 0}, {1, 0, -1}}, {{0, 0}, {1, 0, -1}}, {{6, 4}, {0, 0, 0}}}, 0.5);
  CHECK(f.cells_touched() == 35);
  CHECK(f.step_counter() == 2);
}

TEST_CASE("perception windows") {
  PheromoneField f(8, 8, 2);
  CHECK(f.perceive({3, 3}, 1) == std::vector<double>(18, 0.0));
  f.assign(std::vector<double>(128, 0.7), 0);
  CHECK(f.perceive({3, 3}, 1) == std::vector<double>(18, 0.7));
  const auto corner = f.perceive({0, 0}, 1);
  int zero_cells = 0;
  for (int k = 0; k < 9; ++k) zero_cells += corner[2 * k] == 0.0 && corner[2 * k + 1] == 0.0;
  CHECK(zero_cells == 5);

  std::vector<double> values(128);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      for (int a = 0; a < 2; ++a) values[(r * 8 + c) * 2 + a] = r * 100 + c * 10 + a;
  f.assign(values, 0);
  const auto w = f.perceive({4, 2}, 1);
  // row-major over the window, channels innermost
  CHECK(w[0] == 310);
  CHECK(w[1] == 311);
  CHECK(w[2] == 320);
  CHECK(w[8] == 420);
  CHECK(w[17] == 531);
  CHECK(f.perceive({4, 2}, 2).size() == 50);
  CHECK_THROWS_AS(f.perceive({8, 0}, 1), std::out_of_range);
}

TEST_CASE("assign validates shape and finiteness") {
  PheromoneField f(2, 2, 2);
  CHECK_THROWS(f.assign(std::vector<double>(7, 0.0), 0));
  std::vector<double> bad(8, 0.0);
  bad[3] = NAN;
  CHECK_THROWS(f.assign(bad, 0));
}
