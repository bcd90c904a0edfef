#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "wic/transport.hpp"

using namespace wic;

namespace {

FiniteDistribution random_distribution(const std::vector<Cell>& pool, int n, Rng& rng) {
  std::vector<Cell> cells = pool;
  for (int i = 0; i < n; ++i)
    std::swap(cells[i], cells[i + uniform_below(rng, cells.size() - i)]);
  FiniteDistribution d;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    d.support.push_back(cells[i]);
    d.mass.push_back(0.05 + uniform01(rng));
    total += d.mass.back();
  }
  for (double& m : d.mass) m /= total;
  // Push the rounding residue into the last entry so the sum is exact enough.
  const double sum = std::accumulate(d.mass.begin(), d.mass.end() - 1, 0.0);
  d.mass.back() = 1.0 - sum;
  return d;
}

// Brute-force transportation oracle for 3x3 problems: every vertex of the
// transportation polytope is produced by the north-west-corner style greedy
// fill along some ordering of the 9 cells, so the minimum over all 9!
// orderings is the LP optimum.
double brute_force_3x3(const std::array<double, 3>& a, const std::array<double, 3>& b,
                       const std::array<std::array<double, 3>, 3>& cost) {
  std::array<int, 9> order;
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::array<double, 3> supply = a;
    std::array<double, 3> demand = b;
    double total = 0.0;
    for (int cell : order) {
      const int i = cell / 3;
      const int j = cell % 3;
      const double x = std::min(supply[i], demand[j]);
      supply[i] -= x;
      demand[j] -= x;
      total += x * cost[i][j];
    }
    best = std::min(best, total);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

MetricTable hand_metric(const std::vector<Cell>& pts, const Matrix& d) { return MetricTable(pts, d); }

}  // namespace

TEST_CASE("identical distributions cost nothing") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  Rng rng(1);
  const auto mu = random_distribution(g.free_cells(), 6, rng);
  const auto r = exact_w1(mu, mu, m);
  CHECK(std::abs(r.cost) <= 1e-12);
  for (int i = 0; i < 6; ++i) CHECK(r.plan.mass(i, i) == doctest::Approx(mu.mass[i]).epsilon(1e-12));
}

TEST_CASE("Dirac source collapses to an expectation") {
  const GridSpec g = four_rooms_spec();
  const MetricTable m = MetricTable::from_grid(g);
  const DistanceTable d(g);
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto nu = random_distribution(g.free_cells(), 8, rng);
    double expect = 0.0;
    for (std::size_t i = 0; i < nu.support.size(); ++i) expect += nu.mass[i] * d(g.start(), nu.support[i]);
    CHECK(std::abs(exact_w1(FiniteDistribution::dirac(g.start()), nu, m).cost - expect) <= 1e-9);
  }
}

TEST_CASE("3-point fixture matches exhaustive vertex enumeration") {
  Rng rng(3);
  const std::vector<Cell> pts = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}};
  for (int trial = 0; trial < 30; ++trial) {
    // Random metric: shortest paths over random positive edge weights.
    Matrix d(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) d(i, j) = d(j, i) = i == j ? 0.0 : 0.5 + 3.0 * uniform01(rng);
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    const MetricTable m = hand_metric(pts, d);
    FiniteDistribution mu{{pts[0], pts[1], pts[2]}, {}};
    FiniteDistribution nu{{pts[3], pts[4], pts[5]}, {}};
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    double sa = 0.0;
    double sb = 0.0;
    for (int i = 0; i < 3; ++i) {
      a[i] = 0.1 + uniform01(rng);
      b[i] = 0.1 + uniform01(rng);
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 3; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    a[2] = 1.0 - a[0] - a[1];
    b[2] = 1.0 - b[0] - b[1];
    mu.mass.assign(a.begin(), a.end());
    nu.mass.assign(b.begin(), b.end());
    std::array<std::array<double, 3>, 3> cost{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cost[i][j] = d(i, 3 + j);
    const auto r = exact_w1(mu, nu, m);
    CHECK(r.cost == doctest::Approx(brute_force_3x3(a, b, cost)).epsilon(1e-10));
    // The plan is feasible and attains the cost.
    double attained = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(r.plan.mass.row(i).sum() - a[i]) <= 1e-12);
      CHECK(std::abs(r.plan.mass.col(i).sum() - b[i]) <= 1e-12);
      for (int j = 0; j < 3; ++j) {
        CHECK(r.plan.mass(i, j) >= -1e-15);
        attained += r.plan.mass(i, j) * cost[i][j];
      }
    }
    CHECK(attained == doctest::Approx(r.cost).epsilon(1e-12));
  }
}

TEST_CASE("symmetry and triangle inequality") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  Rng rng(4);
  std::vector<Cell> pool;
  for (const Cell c : g.free_cells())
    if (c.row < 6 && c.col < 6) pool.push_back(c);
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = random_distribution(pool, 1 + static_cast<int>(uniform_below(rng, 8)), rng);
    const auto y = random_distribution(pool, 1 + static_cast<int>(uniform_below(rng, 8)), rng);
    const auto z = random_distribution(pool, 1 + static_cast<int>(uniform_below(rng, 8)), rng);
    const double xy = exact_w1(x, y, m).cost;
    CHECK(std::abs(xy - exact_w1(y, x, m).cost) <= 1e-9);
    CHECK(exact_w1(x, z, m).cost <= xy + exact_w1(y, z, m).cost + 1e-9);
  }
}

TEST_CASE("mass mismatch is rejected") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  const FiniteDistribution mu{{{0, 0}}, {1.0}};
  const FiniteDistribution nu{{{0, 1}, {0, 2}}, {0.5, 0.4}};
  CHECK_THROWS_AS(exact_w1(mu, nu, m), ContractViolation);
  const FiniteDistribution dup{{{0, 1}, {0, 1}}, {0.5, 0.5}};
  CHECK_THROWS(dup.validate());
  const FiniteDistribution neg{{{0, 1}, {0, 2}}, {1.5, -0.5}};
  CHECK_THROWS(neg.validate());
}

TEST_CASE("dual gap examples") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  const DistanceTable d(g);
  Rng rng(5);
  const auto nu = random_distribution(g.free_cells(), 5, rng);
  const auto mu = FiniteDistribution::dirac(g.start());
  std::map<Cell, double> constant;
  std::map<Cell, double> distance;
  for (const Cell c : g.free_cells()) {
    constant[c] = 4.2;
    distance[c] = d(g.start(), c);
  }
  CHECK(std::abs(dual_gap(mu, nu, m, constant)) <= 1e-12);
  CHECK(dual_gap(mu, nu, m, distance) == doctest::Approx(exact_w1(mu, nu, m).cost).epsilon(1e-12));
}

TEST_CASE("dual gap never exceeds W1 for random 1-Lipschitz potentials") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  const DistanceTable d(g);
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = random_distribution(g.free_cells(), 2, rng);
    const auto nu = random_distribution(g.free_cells(), 3, rng);
    std::map<Cell, double> f;
    const Cell anchor = g.cell_at(static_cast<int>(uniform_below(rng, 225)));
    const double slope = uniform01(rng);
    for (const Cell c : g.free_cells()) f[c] = slope * d(anchor, c);
    CHECK(dual_gap(mu, nu, m, f) <= exact_w1(mu, nu, m).cost + 1e-9);
  }
}

TEST_CASE("Lipschitz violations name the offending pair") {
  const GridSpec g = tabular15_spec();
  const MetricTable m = MetricTable::from_grid(g);
  const FiniteDistribution mu{{{0, 0}}, {1.0}};
  const FiniteDistribution nu{{{0, 1}}, {1.0}};
  std::map<Cell, double> f = {{{0, 0}, 0.0}, {{0, 1}, 1.5}};
  try {
    dual_gap(mu, nu, m, f);
    FAIL("expected a Lipschitz violation");
  } catch (const LipschitzViolation& v) {
    CHECK(v.difference == doctest::Approx(1.5));
    CHECK(v.distance == 1.0);
    CHECK(((v.first == Cell{0, 0} && v.second == Cell{0, 1}) ||
           (v.first == Cell{0, 1} && v.second == Cell{0, 0})));
  }
}
