#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "archbuild/grid.hpp"
#include "archbuild/message.hpp"

namespace archbuild {

inline constexpr int kMessageBudget = 10;

/// 0.9^t by repeated multiplication (keeps the value platform-independent).
inline double discount(int t) {
  double d = 1.0;
  for (int i = 0; i < t; ++i) d *= 0.9;
  return d;
}

/// (0.1 * matched + 1 * [state == goal]) * 0.9^t
inline double reward(Grid state_after, Grid goal, int matched, int t) {
  double base = 0.1 * matched + (state_after == goal ? 1.0 : 0.0);
  return base * discount(t);
}

struct StepResult {
  Grid next_state;
  double reward = 0.0;
  bool terminal = false;
  int cells_matched = 0;
};

/// Execute one message (possibly an abstraction) at message index t. The
/// whole expansion consumes a single time step; matched cells are summed
/// across it and the completion bonus is judged on the final grid.
inline StepResult step(Grid state, Grid goal, int message_id, const Lexicon& lexicon,
                       int t, int budget = kMessageBudget) {
  Grid grid = state;
  int matched = 0;
  for (BlockAction action : lexicon.expansion(message_id)) {
    if (!can_place(grid, action)) {
      throw InvalidMessage("expansion of " + lexicon.name(message_id) +
                           " hits an invalid placement; caller must mask");
    }
    PlacementOutcome out = place_block(grid, action);
    matched += partial_match(grid, out.covered, goal);
    grid = out.new_grid;
  }
  StepResult result;
  result.next_state = grid;
  result.cells_matched = matched;
  result.reward = reward(grid, goal, matched, t);
  result.terminal = grid == goal || unreachable(grid, goal) || t + 1 >= budget;
  return result;
}

/// Legal iff active and the full expansion executes without overflow.
inline bool message_legal(const std::array<int, kGridSize>& heights,
                          const Lexicon& lexicon, int id) {
  if (!lexicon.active(id)) return false;
  auto h = heights;
  for (BlockAction action : lexicon.expansion(id)) {
    if (!can_place(h, action)) return false;
    apply_to_heights(h, action);
  }
  return true;
}

inline bool message_legal(Grid state, const Lexicon& lexicon, int id) {
  return message_legal(state.column_heights(), lexicon, id);
}

/// Boolean mask of length m_max. The goal does not influence legality; it is
/// part of the signature so callers carry the full decision context.
inline std::vector<bool> legal_messages(Grid state, [[maybe_unused]] Grid goal,
                                        const Lexicon& lexicon) {
  std::vector<bool> mask(static_cast<std::size_t>(lexicon.m_max()), false);
  auto heights = state.column_heights();
  for (int id = 0; id < lexicon.active_count(); ++id) {
    mask[static_cast<std::size_t>(id)] = message_legal(heights, lexicon, id);
  }
  return mask;
}

/// Highest-Q legal message (ties broken by lowest id); nullopt if none legal.
inline std::optional<std::pair<int, double>> best_legal(
    const std::vector<double>& q, const std::array<int, kGridSize>& heights,
    const Lexicon& lexicon) {
  std::optional<std::pair<int, double>> best;
  for (int id = 0; id < lexicon.active_count(); ++id) {
    if (!message_legal(heights, lexicon, id)) continue;
    double value = q[static_cast<std::size_t>(id)];
    if (!best || value > best->second) best = {id, value};
  }
  return best;
}

}  // namespace archbuild
