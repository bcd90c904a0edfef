#pragma once

#include <map>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/errors.hpp"
#include "wic/gridworld.hpp"

namespace wic {

// Probability mass on a finite set of distinct cells.
struct FiniteDistribution {
  std::vector<Cell> support;
  std::vector<double> mass;

  static FiniteDistribution dirac(Cell c) { return {{c}, {1.0}}; }

  // Masses non-negative and summing to 1 within 1e-12, support distinct.
  void validate() const;
};

// Ground distances between a fixed set of points. Non-negative with a zero
// diagonal; symmetry is not required.
class MetricTable {
 public:
  MetricTable(std::vector<Cell> points, Matrix distances);

  // Step-count metric over all free cells of a grid.
  static MetricTable from_grid(const GridSpec& spec);

  bool contains(Cell c) const { return index_.count(c) != 0; }
  double operator()(Cell a, Cell b) const;
  const std::vector<Cell>& points() const { return points_; }

 private:
  int index(Cell c) const;

  std::vector<Cell> points_;
  Matrix distances_;
  std::map<Cell, int> index_;
};

// mass(i, j) is moved from mu.support[i] to nu.support[j].
struct CouplingPlan {
  Matrix mass;
};

struct TransportResult {
  double cost = 0.0;
  CouplingPlan plan;
};

// Exact Wasserstein-1 distance by min-cost flow on the bipartite
// transportation network (successive shortest paths with Dijkstra on
// reduced costs).
TransportResult exact_w1(const FiniteDistribution& mu, const FiniteDistribution& nu,
                         const MetricTable& metric);

class LipschitzViolation : public ContractViolation {
 public:
  LipschitzViolation(Cell a, Cell b, double difference, double distance);

  Cell first;
  Cell second;
  double difference;
  double distance;
};

// E_nu[f] - E_mu[f] after checking |f(x) - f(y)| <= d(x, y) on every pair of
// the joint support. A violation throws LipschitzViolation naming the pair.
double dual_gap(const FiniteDistribution& mu, const FiniteDistribution& nu,
                const MetricTable& metric, const std::map<Cell, double>& f);

}  // namespace wic
