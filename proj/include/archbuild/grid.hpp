#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>

#include "archbuild/errors.hpp"

namespace archbuild {

inline constexpr int kGridSize = 6;
inline constexpr int kCellCount = kGridSize * kGridSize;

struct Cell {
  int row = 0;  // 0 = bottom
  int col = 0;  // 0 = leftmost
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// 6x6 occupancy grid packed into a 36-bit mask. Row 0 is the bottom row.
class Grid {
 public:
  constexpr Grid() = default;

  static constexpr Grid from_mask(std::uint64_t mask) {
    Grid g;
    g.bits_ = mask;
    return g;
  }

  static constexpr int index(int row, int col) { return row * kGridSize + col; }

  std::uint64_t mask() const { return bits_; }
  bool occupied(int row, int col) const { return (bits_ >> index(row, col)) & 1u; }
  void set(int row, int col) { bits_ |= std::uint64_t{1} << index(row, col); }
  int count() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }

  /// True iff every occupied cell of *this is also occupied in `other`.
  bool subset_of(Grid other) const { return (bits_ & ~other.bits_) == 0; }

  /// One above the topmost occupied row of the column; 0 if the column is empty.
  /// A new block in this column rests at this row.
  int column_height(int col) const {
    for (int row = kGridSize - 1; row >= 0; --row) {
      if (occupied(row, col)) return row + 1;
    }
    return 0;
  }

  std::array<int, kGridSize> column_heights() const {
    std::array<int, kGridSize> heights{};
    for (int col = 0; col < kGridSize; ++col) heights[col] = column_height(col);
    return heights;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::uint64_t bits_ = 0;
};

enum class Orientation { vertical, horizontal };

/// A block drop: vertical 1x2 or horizontal 2x1, anchored at a 0-based column.
/// User-facing names are 1-based (V1..V6, H1..H6).
struct BlockAction {
  Orientation orientation = Orientation::vertical;
  int column = 0;
  friend bool operator==(const BlockAction&, const BlockAction&) = default;
};

struct PlacementOutcome {
  Grid new_grid;
  std::array<Cell, 2> covered;
};

inline bool can_place(const std::array<int, kGridSize>& heights, BlockAction action) {
  if (action.column < 0) return false;
  if (action.orientation == Orientation::vertical) {
    return action.column < kGridSize && heights[action.column] + 2 <= kGridSize;
  }
  if (action.column + 1 >= kGridSize) return false;  // H6 never fits
  int rest = std::max(heights[action.column], heights[action.column + 1]);
  return rest + 1 <= kGridSize;
}

inline bool can_place(Grid grid, BlockAction action) {
  return can_place(grid.column_heights(), action);
}

/// Advance a column-height profile as if the block were placed.
inline void apply_to_heights(std::array<int, kGridSize>& heights, BlockAction action) {
  if (action.orientation == Orientation::vertical) {
    heights[action.column] += 2;
  } else {
    int rest = std::max(heights[action.column], heights[action.column + 1]);
    heights[action.column] = rest + 1;
    heights[action.column + 1] = rest + 1;
  }
}

/// Drop a block under gravity: it rests on the taller of the columns it spans.
inline PlacementOutcome place_block(Grid grid, BlockAction action) {
  auto heights = grid.column_heights();
  if (!can_place(heights, action)) {
    throw InvalidPlacement("placement overflows the grid (orientation=" +
                           std::string(action.orientation == Orientation::vertical
                                           ? "V"
                                           : "H") +
                           ", column=" + std::to_string(action.column + 1) + ")");
  }
  PlacementOutcome out;
  out.new_grid = grid;
  if (action.orientation == Orientation::vertical) {
    int row = heights[action.column];
    out.covered = {Cell{row, action.column}, Cell{row + 1, action.column}};
  } else {
    int row = std::max(heights[action.column], heights[action.column + 1]);
    out.covered = {Cell{row, action.column}, Cell{row, action.column + 1}};
  }
  for (const Cell& c : out.covered) out.new_grid.set(c.row, c.col);
  return out;
}

/// Newly covered cells that land inside the goal (0, 1 or 2 for one block).
inline int partial_match(Grid /*pre_grid*/, const std::array<Cell, 2>& covered,
                         Grid goal) {
  int matched = 0;
  for (const Cell& c : covered) {
    if (goal.occupied(c.row, c.col)) ++matched;
  }
  return matched;
}

/// Blocks are never removed, so one occupied cell outside the goal dooms the
/// episode.
inline bool unreachable(Grid state, Grid goal) { return !state.subset_of(goal); }

}  // namespace archbuild
