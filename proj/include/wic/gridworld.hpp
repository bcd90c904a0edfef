#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wic {

// A grid cell. Row 0 is the top row; col 0 is the left column.
struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Action : std::uint8_t { Up, Down, Left, Right, NoOp };

inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::NoOp};

char action_symbol(Action a);
std::optional<Action> action_from_symbol(char c);

enum class FeatureMode { OneHot, ScaledXY };

std::string_view to_string(FeatureMode mode);

// Static description of a deterministic grid world. Construction validates
// that every wall lies inside the grid and that the start cell is free.
class GridSpec {
 public:
  GridSpec(int width, int height, std::span<const Cell> walls, Cell start,
           FeatureMode mode);

  // Obstacle-free rectangle.
  static GridSpec open_room(int width, int height, Cell start,
                            FeatureMode mode);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }
  Cell start() const { return start_; }
  FeatureMode feature_mode() const { return mode_; }
  int feature_dim() const;

  bool in_bounds(Cell c) const;
  bool is_wall(Cell c) const;
  // In bounds and not a wall.
  bool is_free(Cell c) const;

  int index_of(Cell c) const { return c.row * width_ + c.col; }
  Cell cell_at(int index) const { return {index / width_, index % width_}; }

  std::vector<Cell> walls() const;
  std::vector<Cell> free_cells() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int width_;
  int height_;
  Cell start_;
  FeatureMode mode_;
  std::vector<bool> wall_mask_;
};

// 15x15 open room, start at the center, one-hot features.
GridSpec tabular15_spec();

// 13x13 four-rooms layout with doorways at (3,6), (10,6), (6,3), (6,10);
// start at the center of the bottom-left room, scaled (x, y) features.
GridSpec four_rooms_spec();

// Parses a text map: '#' wall, '.' floor, 'S' start (exactly one).
GridSpec parse_layout(std::string_view text, FeatureMode mode);
GridSpec load_layout_file(const std::string& path, FeatureMode mode);
std::string format_layout(const GridSpec& spec);

// Deterministic transition. Moves into walls or off the grid leave the agent
// in place. Up decreases row, Left decreases col.
Cell step(const GridSpec& spec, Cell s, Action a);

void featurize_into(const GridSpec& spec, Cell s, std::span<double> out);
std::vector<double> featurize(const GridSpec& spec, Cell s);

// Minimal number of steps between two free cells, or nullopt when no path
// exists.
std::optional<int> bfs_distance(const GridSpec& spec, Cell from, Cell to);

// Single-source BFS over all cells, indexed by GridSpec::index_of. Walls and
// unreachable cells hold -1.
std::vector<int> bfs_distances_from(const GridSpec& spec, Cell from);

// All-pairs step distances, cached per spec for repeated lookups.
class DistanceTable {
 public:
  explicit DistanceTable(const GridSpec& spec);

  // -1 when unreachable.
  int operator()(Cell from, Cell to) const;

 private:
  int width_;
  int cells_;
  std::vector<int> table_;
};

}  // namespace wic
