#include "wic/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "wic/errors.hpp"

namespace wic {

namespace {

std::string cell_str(Cell c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

}  // namespace

char action_symbol(Action a) {
  switch (a) {
    case Action::Up: return 'U';
    case Action::Down: return 'D';
    case Action::Left: return 'L';
    case Action::Right: return 'R';
    case Action::NoOp: return 'N';
  }
  return '?';
}

std::optional<Action> action_from_symbol(char c) {
  switch (c) {
    case 'U': return Action::Up;
    case 'D': return Action::Down;
    case 'L': return Action::Left;
    case 'R': return Action::Right;
    case 'N': return Action::NoOp;
    default: return std::nullopt;
  }
}

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::OneHot ? "one_hot" : "scaled_xy";
}

GridSpec::GridSpec(int width, int height, std::span<const Cell> walls,
                   Cell start, FeatureMode mode)
    : width_(width), height_(height), start_(start), mode_(mode) {
  require(width >= 1 && height >= 1, "grid dimensions must be positive");
  require(mode != FeatureMode::ScaledXY || (width >= 2 && height >= 2),
          "scaled_xy features need at least 2 cells per axis");
  wall_mask_.assign(static_cast<std::size_t>(width) * height, false);
  for (const Cell& w : walls) {
    require(in_bounds(w), "wall " + cell_str(w) + " lies outside the grid");
    wall_mask_[index_of(w)] = true;
  }
  require(in_bounds(start), "start cell " + cell_str(start) + " is outside the grid");
  require(!is_wall(start), "start cell " + cell_str(start) + " is a wall");
}

GridSpec GridSpec::open_room(int width, int height, Cell start,
                             FeatureMode mode) {
  return GridSpec(width, height, {}, start, mode);
}

int GridSpec::feature_dim() const {
  return mode_ == FeatureMode::OneHot ? cell_count() : 2;
}

bool GridSpec::in_bounds(Cell c) const {
  return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
}

bool GridSpec::is_wall(Cell c) const { return wall_mask_[index_of(c)]; }

bool GridSpec::is_free(Cell c) const { return in_bounds(c) && !is_wall(c); }

std::vector<Cell> GridSpec::walls() const {
  std::vector<Cell> out;
  for (int i = 0; i < cell_count(); ++i)
    if (wall_mask_[i]) out.push_back(cell_at(i));
  return out;
}

std::vector<Cell> GridSpec::free_cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < cell_count(); ++i)
    if (!wall_mask_[i]) out.push_back(cell_at(i));
  return out;
}

GridSpec tabular15_spec() {
  return GridSpec::open_room(15, 15, {7, 7}, FeatureMode::OneHot);
}

GridSpec four_rooms_spec() {
  constexpr int n = 13;
  constexpr int mid = 6;
  const std::array<Cell, 4> doors = {Cell{3, 6}, Cell{10, 6}, Cell{6, 3},
                                     Cell{6, 10}};
  std::vector<Cell> walls;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell cell{r, c};
      const bool boundary = r == 0 || c == 0 || r == n - 1 || c == n - 1;
      const bool divider = r == mid || c == mid;
      const bool door = std::find(doors.begin(), doors.end(), cell) != doors.end();
      if (boundary || (divider && !door)) walls.push_back(cell);
    }
  }
  return GridSpec(n, n, walls, {9, 3}, FeatureMode::ScaledXY);
}

GridSpec parse_layout(std::string_view text, FeatureMode mode) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("layout: empty map");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  std::vector<Cell> walls;
  std::optional<Cell> start;
  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[r].size()) != width)
      throw ConfigError("layout: row " + std::to_string(r) + " has length " +
                        std::to_string(rows[r].size()) + ", expected " +
                        std::to_string(width));
    for (int c = 0; c < width; ++c) {
      switch (rows[r][c]) {
        case '#': walls.push_back({r, c}); break;
        case '.': break;
        case 'S':
          if (start) throw ConfigError("layout: more than one 'S'");
          start = Cell{r, c};
          break;
        default:
          throw ConfigError(std::string("layout: unexpected character '") +
                            rows[r][c] + "' at " + cell_str({r, c}));
      }
    }
  }
  if (!start) throw ConfigError("layout: missing start cell 'S'");
  return GridSpec(width, height, walls, *start, mode);
}

GridSpec load_layout_file(const std::string& path, FeatureMode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("layout: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str(), mode);
}

std::string format_layout(const GridSpec& spec) {
  std::string out;
  for (int r = 0; r < spec.height(); ++r) {
    for (int c = 0; c < spec.width(); ++c) {
      const Cell cell{r, c};
      out += cell == spec.start() ? 'S' : spec.is_wall(cell) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

Cell step(const GridSpec& spec, Cell s, Action a) {
  if (!spec.is_free(s)) throw ContractViolation("step: invalid state " + cell_str(s));
  Cell next = s;
  switch (a) {
    case Action::Up: --next.row; break;
    case Action::Down: ++next.row; break;
    case Action::Left: --next.col; break;
    case Action::Right: ++next.col; break;
    case Action::NoOp: break;
  }
  return spec.is_free(next) ? next : s;
}

void featurize_into(const GridSpec& spec, Cell s, std::span<double> out) {
  if (!spec.is_free(s)) throw ContractViolation("featurize: invalid state " + cell_str(s));
  if (static_cast<int>(out.size()) != spec.feature_dim())
    throw ContractViolation("featurize: output buffer has wrong length");
  if (spec.feature_mode() == FeatureMode::OneHot) {
    std::fill(out.begin(), out.end(), 0.0);
    out[spec.index_of(s)] = 1.0;
  } else {
    out[0] = 2.0 * s.col / (spec.width() - 1) - 1.0;
    out[1] = 2.0 * s.row / (spec.height() - 1) - 1.0;
  }
}

std::vector<double> featurize(const GridSpec& spec, Cell s) {
  std::vector<double> out(spec.feature_dim());
  featurize_into(spec, s, out);
  return out;
}

std::vector<int> bfs_distances_from(const GridSpec& spec, Cell from) {
  require(spec.is_free(from), "bfs: invalid state " + cell_str(from));
  std::vector<int> dist(spec.cell_count(), -1);
  std::deque<Cell> frontier{from};
  dist[spec.index_of(from)] = 0;
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (Action a : kAllActions) {
      const Cell n = step(spec, c, a);
      int& d = dist[spec.index_of(n)];
      if (d < 0) {
        d = dist[spec.index_of(c)] + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

std::optional<int> bfs_distance(const GridSpec& spec, Cell from, Cell to) {
  require(spec.is_free(to), "bfs: invalid state " + cell_str(to));
  const int d = bfs_distances_from(spec, from)[spec.index_of(to)];
  if (d < 0) return std::nullopt;
  return d;
}

DistanceTable::DistanceTable(const GridSpec& spec)
    : width_(spec.width()), cells_(spec.cell_count()),
      table_(static_cast<std::size_t>(cells_) * cells_, -1) {
  for (const Cell& c : spec.free_cells()) {
    const auto row = bfs_distances_from(spec, c);
    std::copy(row.begin(), row.end(),
              table_.begin() + static_cast<std::ptrdiff_t>(spec.index_of(c)) * cells_);
  }
}

int DistanceTable::operator()(Cell from, Cell to) const {
  const int i = from.row * width_ + from.col;
  const int j = to.row * width_ + to.col;
  return table_[static_cast<std::size_t>(i) * cells_ + j];
}

}  // namespace wic
