#include "pool/medium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pool/simd/kernels.hpp"

namespace pool {

void MediumConfig::validate() const {
  if (grid_h <= 0 || grid_w <= 0) throw std::invalid_argument("medium: grid must be positive");
  if (world_h <= 0 || world_w <= 0) throw std::invalid_argument("medium: world must be positive");
  if (grid_h > world_h || grid_w > world_w) {
    throw std::invalid_argument("medium: grid " + std::to_string(grid_h) + "x" +
                                std::to_string(grid_w) + " exceeds world " +
                                std::to_string(world_h) + "x" + std::to_string(world_w));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("medium: beta outside [0,1]");
  if (n_actions < 2) throw std::invalid_argument("medium: n_actions must be >= 2");
  if (perception_radius < 0 || influence_radius < 0) {
    throw std::invalid_argument("medium: radii must be non-negative");
  }
}

std::size_t MediumConfig::window_size() const {
  const std::size_t side = 2 * static_cast<std::size_t>(perception_radius) + 1;
  return side * side * static_cast<std::size_t>(n_actions);
}

Cell world_to_cell(std::int64_t x, std::int64_t y, const MediumConfig& cfg) {
  if (x < 0 || x >= cfg.world_h || y < 0 || y >= cfg.world_w) {
    throw std::out_of_range("world_to_cell: (" + std::to_string(x) + "," + std::to_string(y) +
                            ") outside world");
  }
  return Cell{static_cast<int>(x * cfg.grid_h / cfg.world_h),
              static_cast<int>(y * cfg.grid_w / cfg.world_w)};
}

void standardize_into(std::span<const double> q, std::span<double> out) {
  if (q.size() != out.size()) throw std::invalid_argument("standardize: length mismatch");
  if (q.empty()) return;
  double mean = 0.0;
  for (double v : q) {
    if (!std::isfinite(v)) throw std::invalid_argument("standardize: non-finite input");
    mean += v;
  }
  mean /= static_cast<double>(q.size());
  double var = 0.0;
  for (double v : q) var += (v - mean) * (v - mean);
  var /= static_cast<double>(q.size());
  const double sd = std::sqrt(var);
  if (sd < 1e-12) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = (q[i] - mean) / sd;
}

std::vector<double> standardize(std::span<const double> q) {
  std::vector<double> out(q.size());
  standardize_into(q, out);
  return out;
}

void append_deposits(DepositBatch& batch, std::span<const double> q, Cell cell,
                     int influence_radius, int grid_h, int grid_w) {
  std::vector<double> phe = standardize(q);
  for (int dr = -influence_radius; dr <= influence_radius; ++dr) {
    for (int dc = -influence_radius; dc <= influence_radius; ++dc) {
      const Cell c{cell.row + dr, cell.col + dc};
      if (c.row < 0 || c.row >= grid_h || c.col < 0 || c.col >= grid_w) continue;
      batch.push_back(Deposit{c, phe});
    }
  }
}

DepositBatch deposit_for_agent(std::span<const double> q, Cell cell, int influence_radius,
                               int grid_h, int grid_w) {
  DepositBatch batch;
  append_deposits(batch, q, cell, influence_radius, grid_h, grid_w);
  return batch;
}

PheromoneField::PheromoneField(int grid_h, int grid_w, int n_actions)
    : grid_h_(grid_h), grid_w_(grid_w), n_actions_(n_actions) {
  if (grid_h <= 0 || grid_w <= 0 || n_actions <= 0) {
    throw std::invalid_argument("PheromoneField: dimensions must be positive");
  }
  const std::size_t cells = static_cast<std::size_t>(grid_h) * grid_w;
  values_.assign(cells * n_actions, 0.0);
  sums_.assign(cells * n_actions, 0.0);
  counts_.assign(cells, 0);
}

PheromoneField::PheromoneField(const MediumConfig& cfg)
    : PheromoneField(cfg.grid_h, cfg.grid_w, cfg.n_actions) {}

std::span<const double> PheromoneField::at(Cell c) const {
  if (!contains(c)) throw std::out_of_range("PheromoneField::at: cell outside grid");
  return std::span<const double>(values_).subspan(offset(c), n_actions_);
}

void PheromoneField::assign(std::span<const double> values, std::uint64_t step_counter) {
  if (values.size() != values_.size()) throw std::invalid_argument("PheromoneField::assign: size");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("PheromoneField::assign: non-finite");
  }
  std::copy(values.begin(), values.end(), values_.begin());
  step_counter_ = step_counter;
}

void PheromoneField::update(std::span<const Deposit> deposits, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("update: beta outside [0,1]");
  for (const Deposit& d : deposits) {
    if (!contains(d.cell)) throw std::out_of_range("update: deposit cell outside grid");
    if (d.phe.size() != static_cast<std::size_t>(n_actions_)) {
      throw std::invalid_argument("update: deposit length != n_actions");
    }
  }
  std::fill(counts_.begin(), counts_.end(), 0u);
  for (const Deposit& d : deposits) {
    const std::size_t cell_index = static_cast<std::size_t>(d.cell.row) * grid_w_ + d.cell.col;
    double* sum = sums_.data() + cell_index * n_actions_;
    if (counts_[cell_index]++ == 0) std::fill(sum, sum + n_actions_, 0.0);
    for (int a = 0; a < n_actions_; ++a) sum[a] += d.phe[a];
  }

  const auto& k = simd::kernels();
  const double keep = 1.0 - beta;
  const std::size_t cells = counts_.size();
  const auto n = static_cast<std::size_t>(n_actions_);
  std::uint64_t touched = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    double* cell_values = values_.data() + i * n;
    if (counts_[i] > 0) {
      double* mean = sums_.data() + i * n;
      const double count = counts_[i];
      for (std::size_t a = 0; a < n; ++a) mean[a] /= count;
      k.blend(keep, beta, mean, cell_values, n);
    } else {
      k.scale(keep, cell_values, n);
    }
    ++touched;
  }
  cells_touched_ = touched;
  ++step_counter_;
}

void PheromoneField::perceive_into(Cell c, int radius, std::span<double> out) const {
  if (!contains(c)) throw std::out_of_range("perceive: cell outside grid");
  if (radius < 0) throw std::invalid_argument("perceive: negative radius");
  const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
  if (out.size() != side * side * n_actions_) {
    throw std::invalid_argument("perceive: output size mismatch");
  }
  std::size_t pos = 0;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const Cell src{c.row + dr, c.col + dc};
      if (contains(src)) {
        const double* v = values_.data() + offset(src);
        std::copy(v, v + n_actions_, out.begin() + static_cast<std::ptrdiff_t>(pos));
      } else {
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(pos), n_actions_, 0.0);
      }
      pos += n_actions_;
    }
  }
}

PerceptionWindow PheromoneField::perceive(Cell c, int radius) const {
  const std::size_t side = 2 * static_cast<std::size_t>(radius < 0 ? 0 : radius) + 1;
  PerceptionWindow out(side * side * n_actions_);
  perceive_into(c, radius, out);
  return out;
}

void PheromoneField::clear() {
  std::fill(values_.begin(), values_.end(), 0.0);
  step_counter_ = 0;
  cells_touched_ = 0;
}

}  // namespace pool
