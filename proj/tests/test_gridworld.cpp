#include <cstdlib>
#include <deque>
#include <limits>
#include <vector>

#include "doctest.h"
#include "wic/errors.hpp"
#include "wic/gridworld.hpp"

using namespace wic;

namespace {

// Floyd-Warshall over the 4-neighbour graph of free cells; independent of the
// BFS under test.
std::vector<std::vector<int>> floyd_warshall(const GridSpec& spec) {
  const int n = spec.cell_count();
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) {
    const Cell a = spec.cell_at(i);
    if (!spec.is_free(a)) continue;
    d[i][i] = 0;
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const Cell b{a.row + dr[k], a.col + dc[k]};
      if (spec.is_free(b)) d[i][spec.index_of(b)] = 1;
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  for (auto& row : d)
    for (int& x : row)
      if (x >= inf) x = -1;
  return d;
}

}  // namespace

TEST_CASE("step follows the movement convention and clamps") {
  const GridSpec g = tabular15_spec();
  CHECK(step(g, {7, 7}, Action::Up) == Cell{6, 7});
  CHECK(step(g, {7, 7}, Action::Down) == Cell{8, 7});
  CHECK(step(g, {7, 7}, Action::Left) == Cell{7, 6});
  CHECK(step(g, {7, 7}, Action::Right) == Cell{7, 8});
  CHECK(step(g, {0, 0}, Action::Up) == Cell{0, 0});
  CHECK(step(g, {0, 0}, Action::Left) == Cell{0, 0});
  CHECK(step(g, {14, 14}, Action::Down) == Cell{14, 14});
  CHECK(step(g, {3, 3}, Action::NoOp) == Cell{3, 3});
}

TEST_CASE("step rejects invalid states") {
  const GridSpec g = tabular15_spec();
  CHECK_THROWS_AS(step(g, {-1, 0}, Action::Up), ContractViolation);
  CHECK_THROWS_AS(step(g, {0, 15}, Action::Up), ContractViolation);
  const GridSpec rooms = four_rooms_spec();
  CHECK_THROWS_AS(step(rooms, {0, 0}, Action::Down), ContractViolation);
}

TEST_CASE("step never leaves the free cells (exhaustive)") {
  for (const GridSpec& g : {tabular15_spec(), four_rooms_spec()}) {
    for (const Cell c : g.free_cells()) {
      for (Action a : kAllActions) {
        const Cell n = step(g, c, a);
        CHECK(g.is_free(n));
        CHECK(std::abs(n.row - c.row) + std::abs(n.col - c.col) <= 1);
      }
    }
  }
}

TEST_CASE("four-rooms layout") {
  const GridSpec g = four_rooms_spec();
  CHECK(g.width() == 13);
  CHECK(g.height() == 13);
  CHECK(g.start() == Cell{9, 3});
  CHECK(g.feature_mode() == FeatureMode::ScaledXY);
  CHECK(g.feature_dim() == 2);
  for (int i = 0; i < 13; ++i) {
    CHECK(g.is_wall({0, i}));
    CHECK(g.is_wall({12, i}));
    CHECK(g.is_wall({i, 0}));
    CHECK(g.is_wall({i, 12}));
  }
  for (int i = 1; i < 12; ++i) {
    const bool col_door = i == 3 || i == 10;
    CHECK(g.is_wall({i, 6}) == !col_door);
    CHECK(g.is_wall({6, i}) == !col_door);
  }
  // Start-room center to the diagonal room center (3, 9): hand-traced through
  // the (6,3) and (3,6) doorways.
  CHECK(bfs_distance(g, g.start(), {3, 9}) == 12);
}

TEST_CASE("featurize") {
  const GridSpec g = tabular15_spec();
  CHECK(g.feature_dim() == 225);
  const auto x = featurize(g, {0, 0});
  CHECK(x.size() == 225);
  CHECK(x[0] == 1.0);
  double sum = 0.0;
  for (double v : x) sum += v;
  CHECK(sum == 1.0);
  const auto y = featurize(g, {3, 4});
  CHECK(y[3 * 15 + 4] == 1.0);

  const GridSpec rooms = four_rooms_spec();
  const GridSpec open13 = GridSpec::open_room(13, 13, {6, 6}, FeatureMode::ScaledXY);
  CHECK(featurize(open13, {6, 6}) == std::vector<double>{0.0, 0.0});
  CHECK(featurize(open13, {0, 12}) == std::vector<double>{1.0, -1.0});
  for (const Cell c : rooms.free_cells()) {
    const auto f = featurize(rooms, c);
    CHECK(f[0] >= -1.0);
    CHECK(f[0] <= 1.0);
    CHECK(f[1] >= -1.0);
    CHECK(f[1] <= 1.0);
  }
}

TEST_CASE("bfs matches Floyd-Warshall on both layouts") {
  for (const GridSpec& g : {tabular15_spec(), four_rooms_spec()}) {
    const auto fw = floyd_warshall(g);
    const DistanceTable table(g);
    for (const Cell a : g.free_cells()) {
      const auto row = bfs_distances_from(g, a);
      for (const Cell b : g.free_cells()) {
        const int expect = fw[g.index_of(a)][g.index_of(b)];
        REQUIRE(row[g.index_of(b)] == expect);
        REQUIRE(table(a, b) == expect);
      }
    }
  }
}

TEST_CASE("bfs in the open room is Manhattan distance") {
  const GridSpec g = tabular15_spec();
  CHECK(bfs_distance(g, {7, 7}, {7, 7}) == 0);
  CHECK(bfs_distance(g, {7, 7}, {4, 9}) == 5);
  const DistanceTable table(g);
  for (const Cell a : g.free_cells())
    for (const Cell b : g.free_cells())
      REQUIRE(table(a, b) == std::abs(a.row - b.row) + std::abs(a.col - b.col));
}

TEST_CASE("bfs is a metric on small grids (exhaustive)") {
  const char* text =
      "#####\n"
      "#S..#\n"
      "#.#.#\n"
      "#...#\n"
      "#####\n";
  const GridSpec g = parse_layout(text, FeatureMode::OneHot);
  const DistanceTable d(g);
  const auto cells = g.free_cells();
  for (const Cell a : cells) {
    CHECK(d(a, a) == 0);
    for (const Cell b : cells) {
      CHECK(d(a, b) == d(b, a));
      for (const Cell c : cells) CHECK(d(a, c) <= d(a, b) + d(b, c));
    }
  }
}

TEST_CASE("unreachable cells report no distance") {
  const char* text =
      "S#.\n"
      ".#.\n";
  const GridSpec g = parse_layout(text, FeatureMode::OneHot);
  CHECK_FALSE(bfs_distance(g, {0, 0}, {0, 2}).has_value());
  CHECK(DistanceTable(g)({0, 0}, {1, 2}) == -1);
  CHECK(bfs_distance(g, {0, 0}, {1, 0}) == 1);
}

TEST_CASE("layout text round trip and validation") {
  const GridSpec g = four_rooms_spec();
  const GridSpec back = parse_layout(format_layout(g), FeatureMode::ScaledXY);
  CHECK(back == g);
  CHECK_THROWS_AS(parse_layout("...\n...\n", FeatureMode::OneHot), ConfigError);
  CHECK_THROWS_AS(parse_layout("S.\nS.\n", FeatureMode::OneHot), ConfigError);
  CHECK_THROWS_AS(parse_layout("S..\n..\n", FeatureMode::OneHot), ConfigError);
  CHECK_THROWS_AS(parse_layout("S.x\n...\n", FeatureMode::OneHot), ConfigError);
  const std::vector<Cell> bad_wall = {{5, 5}};
  CHECK_THROWS(GridSpec(3, 3, bad_wall, {0, 0}, FeatureMode::OneHot));
  const std::vector<Cell> wall_on_start = {{0, 0}};
  CHECK_THROWS(GridSpec(3, 3, wall_on_start, {0, 0}, FeatureMode::OneHot));
}

TEST_CASE("action symbols") {
  for (Action a : kAllActions) CHECK(action_from_symbol(action_symbol(a)) == a);
  CHECK_FALSE(action_from_symbol('x').has_value());
}
