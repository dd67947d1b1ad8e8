#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "archbuild/env.hpp"
#include "archbuild/errors.hpp"
#include "archbuild/grid.hpp"
#include "archbuild/message.hpp"
#include "archbuild/rng.hpp"
#include "archbuild/textio.hpp"

namespace archbuild {

/// Six art lines, top row first, '#' occupied and '.' empty.
inline std::vector<std::string> grid_to_art(Grid grid) {
  std::vector<std::string> lines;
  for (int row = kGridSize - 1; row >= 0; --row) {
    std::string line;
    for (int col = 0; col < kGridSize; ++col) {
      line += grid.occupied(row, col) ? '#' : '.';
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

inline Grid grid_from_art(const std::vector<std::string>& lines) {
  if (lines.size() != kGridSize) {
    throw ParseError("grid art needs exactly 6 lines, got " +
                     std::to_string(lines.size()));
  }
  Grid grid;
  for (int i = 0; i < kGridSize; ++i) {
    const std::string& line = lines[static_cast<std::size_t>(i)];
    if (line.size() != kGridSize) {
      throw ParseError("grid art line '" + line + "' must have 6 characters");
    }
    int row = kGridSize - 1 - i;
    for (int col = 0; col < kGridSize; ++col) {
      char c = line[static_cast<std::size_t>(col)];
      if (c == '#') {
        grid.set(row, col);
      } else if (c != '.') {
        throw ParseError(std::string("grid art may contain only '.' and '#', got '") +
                         c + "'");
      }
    }
  }
  return grid;
}

struct BuildabilityResult {
  bool buildable = false;
  std::vector<int> witness;  // primitive message ids, shortest build
};

/// BFS over goal-subset states: from the empty grid, try every primitive
/// placement whose covered cells stay inside the goal. Returns the shortest
/// witness when one exists. Doubles as the brute-force min_primitives oracle.
inline BuildabilityResult validate_buildable(Grid goal) {
  if (goal.empty()) return {true, {}};
  struct Parent {
    std::uint64_t prev;
    int action_id;
  };
  std::unordered_map<std::uint64_t, Parent> parents;
  std::deque<std::uint64_t> frontier;
  parents.emplace(0, Parent{0, -1});
  frontier.push_back(0);
  while (!frontier.empty()) {
    std::uint64_t mask = frontier.front();
    frontier.pop_front();
    Grid state = Grid::from_mask(mask);
    auto heights = state.column_heights();
    for (int id = 0; id < kPrimitiveCount; ++id) {
      BlockAction action = primitive_action(id);
      if (!can_place(heights, action)) continue;
      PlacementOutcome out = place_block(state, action);
      if (!out.new_grid.subset_of(goal)) continue;
      std::uint64_t next = out.new_grid.mask();
      if (parents.contains(next)) continue;
      parents.emplace(next, Parent{mask, id});
      if (next == goal.mask()) {
        std::vector<int> witness;
        std::uint64_t cur = next;
        while (cur != 0) {
          const Parent& p = parents.at(cur);
          witness.push_back(p.action_id);
          cur = p.prev;
        }
        std::reverse(witness.begin(), witness.end());
        return {true, std::move(witness)};
      }
      frontier.push_back(next);
    }
  }
  return {false, {}};
}

struct Shape {
  std::string name;
  Grid goal;
  int min_primitives = 0;
};

/// Leading alphabetic prefix of a shape name ("U1" -> "U").
inline std::string shape_family(const std::string& name) {
  std::string family;
  for (char c : name) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) {
      family += c;
    } else {
      break;
    }
  }
  return family.empty() ? name : family;
}

class ShapeCatalog {
 public:
  ShapeCatalog() = default;

  static ShapeCatalog from_shapes(std::vector<Shape> shapes, std::string source) {
    ShapeCatalog catalog;
    catalog.source_ = std::move(source);
    std::unordered_set<std::string> names;
    if (shapes.empty()) throw ParseError("catalog is empty");
    for (Shape& s : shapes) {
      if (!names.insert(s.name).second) {
        throw ParseError("duplicate shape name '" + s.name + "'");
      }
      auto check = validate_buildable(s.goal);
      if (!check.buildable) {
        throw UnbuildableShape("shape '" + s.name + "' cannot be built from blocks");
      }
      s.min_primitives = static_cast<int>(check.witness.size());
      catalog.shapes_.push_back(std::move(s));
    }
    return catalog;
  }

  /// The stock experimental set: 3 two-column towers ("U", legs plus lintel),
  /// 5 side-open "C" frames and 3 "L" hooks, at distinct column anchors.
  static ShapeCatalog builtin_default() {
    std::vector<Shape> shapes;
    auto build = [](std::initializer_list<int> ids) {
      Grid g;
      for (int id : ids) g = place_block(g, primitive_action(id)).new_grid;
      return g;
    };
    // U at columns c,c+1: two verticals capped by a horizontal (a 2x3 tower).
    for (int c : {0, 2, 4}) {
      shapes.push_back(Shape{"U" + std::to_string(c + 1),
                             build({c, c + 1, kGridSize + c}), 0});
    }
    // C at columns c,c+1: bottom bar, left column, top bar; open to the right.
    for (int c : {0, 1, 2, 3, 4}) {
      shapes.push_back(Shape{"C" + std::to_string(c + 1),
                             build({kGridSize + c, c, kGridSize + c}), 0});
    }
    // L at columns c,c+1: bottom bar with a stem up the left column.
    for (int c : {0, 2, 4}) {
      shapes.push_back(Shape{"L" + std::to_string(c + 1),
                             build({kGridSize + c, c}), 0});
    }
    return from_shapes(std::move(shapes), "builtin");
  }

  static ShapeCatalog load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open shape file: " + path.string());
    std::vector<Shape> shapes;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = trim(line);
      if (t.empty()) continue;
      if (!t.starts_with("name:")) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": expected 'name: <identifier>'");
      }
      Shape shape;
      shape.name = std::string(trim(t.substr(5)));
      if (shape.name.empty()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": empty shape name");
      }
      std::vector<std::string> art;
      for (int i = 0; i < kGridSize; ++i) {
        if (!std::getline(in, line)) {
          throw ParseError(path.string() + ": shape '" + shape.name +
                           "' is missing grid lines");
        }
        ++line_no;
        art.push_back(std::string(trim(line)));
      }
      shape.goal = grid_from_art(art);
      shapes.push_back(std::move(shape));
    }
    if (shapes.empty()) throw ParseError(path.string() + ": no shapes found");
    return from_shapes(std::move(shapes), path.string());
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write shape file: " + path.string());
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
      if (i > 0) out << "\n";
      out << "name: " << shapes_[i].name << "\n";
      for (const std::string& row : grid_to_art(shapes_[i].goal)) out << row << "\n";
    }
    if (!out) throw IOError("failed writing shape file: " + path.string());
  }

  std::size_t size() const { return shapes_.size(); }
  const Shape& at(std::size_t i) const { return shapes_.at(i); }
  const std::vector<Shape>& shapes() const { return shapes_; }
  const std::string& source() const { return source_; }

  const Shape* find(const std::string& name) const {
    for (const Shape& s : shapes_) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  ShapeCatalog subset(const std::vector<std::string>& names) const {
    std::vector<Shape> picked;
    for (const std::string& name : names) {
      const Shape* s = find(name);
      if (s == nullptr) throw ParseError("no shape named '" + name + "'");
      picked.push_back(*s);
    }
    return from_shapes(std::move(picked), source_ + ":subset");
  }

 private:
  std::vector<Shape> shapes_;
  std::string source_;
};

/// Uniformly random valid primitive placements applied in sequence; the
/// resulting goal is buildable by construction. Also returns the build.
inline std::pair<Grid, std::vector<int>> random_goal_build(Rng& rng, int n_blocks) {
  Grid grid;
  std::vector<int> build;
  for (int placed = 0; placed < n_blocks; ++placed) {
    auto heights = grid.column_heights();
    std::vector<int> valid;
    for (int id = 0; id < kPrimitiveCount; ++id) {
      if (can_place(heights, primitive_action(id))) valid.push_back(id);
    }
    int id = valid[rng.next_index(valid.size())];
    grid = place_block(grid, primitive_action(id)).new_grid;
    build.push_back(id);
  }
  return {grid, build};
}

inline Grid random_goal(Rng& rng, int n_blocks) {
  return random_goal_build(rng, n_blocks).first;
}

}  // namespace archbuild
