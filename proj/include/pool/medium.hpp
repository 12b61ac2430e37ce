#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pool {

struct Cell {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Geometry of the virtual medium laid over a world of world_h x world_w
/// real cells.
struct MediumConfig {
  int grid_h = 8;
  int grid_w = 8;
  int n_actions = 4;
  double beta = 0.5;  // evaporation coefficient
  int world_h = 8;
  int world_w = 8;
  int perception_radius = 1;  // 3x3 window
  int influence_radius = 0;   // 1x1 cell

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
  std::size_t window_size() const;
};

/// Virtual cell containing world cell (x, y). Throws std::out_of_range when
/// the coordinate lies outside the world.
Cell world_to_cell(std::int64_t x, std::int64_t y, const MediumConfig& cfg);

/// (q - mean) / population std, or zeros when the std is below 1e-12.
/// Throws std::invalid_argument on non-finite input.
std::vector<double> standardize(std::span<const double> q);
void standardize_into(std::span<const double> q, std::span<double> out);

struct Deposit {
  Cell cell;
  std::vector<double> phe;
};
using DepositBatch = std::vector<Deposit>;

/// Standardized q copied onto every in-grid cell within Chebyshev distance
/// influence_radius of cell.
DepositBatch deposit_for_agent(std::span<const double> q, Cell cell, int influence_radius,
                               int grid_h, int grid_w);
void append_deposits(DepositBatch& batch, std::span<const double> q, Cell cell,
                     int influence_radius, int grid_h, int grid_w);

using PerceptionWindow = std::vector<double>;

/// H x W x N_A pheromone grid with evaporation.
///
/// update() is the only mutator used during an episode: it reads a complete
/// batch of deposits for one timestep, then touches every cell exactly once.
/// Readers between commits see a consistent field.
class PheromoneField {
 public:
  PheromoneField(int grid_h, int grid_w, int n_actions);
  explicit PheromoneField(const MediumConfig& cfg);

  int grid_h() const { return grid_h_; }
  int grid_w() const { return grid_w_; }
  int n_actions() const { return n_actions_; }
  std::uint64_t step_counter() const { return step_counter_; }
  /// Cells visited by the most recent update() call.
  std::uint64_t cells_touched() const { return cells_touched_; }

  bool contains(Cell c) const {
    return c.row >= 0 && c.row < grid_h_ && c.col >= 0 && c.col < grid_w_;
  }

  std::span<const double> at(Cell c) const;
  std::span<const double> values() const { return values_; }

  /// Overwrite raw contents (snapshots, tests). Sizes must match; entries
  /// must be finite.
  void assign(std::span<const double> values, std::uint64_t step_counter);

  /// Cells with k >= 1 deposits: (1 - beta) * old + beta * mean(deposits).
  /// Cells without deposits: (1 - beta) * old.
  void update(std::span<const Deposit> deposits, double beta);

  PerceptionWindow perceive(Cell c, int radius) const;
  /// out.size() must equal (2r+1)^2 * n_actions.
  void perceive_into(Cell c, int radius, std::span<double> out) const;

  void clear();

 private:
  std::size_t offset(Cell c) const {
    return (static_cast<std::size_t>(c.row) * grid_w_ + c.col) * n_actions_;
  }

  int grid_h_;
  int grid_w_;
  int n_actions_;
  std::vector<double> values_;
  std::vector<double> sums_;
  std::vector<std::uint32_t> counts_;
  std::uint64_t step_counter_ = 0;
  std::uint64_t cells_touched_ = 0;
};

}  // namespace pool
