#include "wic/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace wic {

namespace {

constexpr double kMassTol = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string cell_str(Cell c) {
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

}  // namespace

void FiniteDistribution::validate() const {
  require(support.size() == mass.size(), "distribution: support and mass lengths differ");
  require(!support.empty(), "distribution: empty support");
  double total = 0.0;
  for (double m : mass) {
    require(m >= 0.0 && std::isfinite(m), "distribution: negative or non-finite mass");
    total += m;
  }
  require(std::abs(total - 1.0) <= 1e-12, "distribution: masses do not sum to 1");
  std::set<Cell> seen(support.begin(), support.end());
  require(seen.size() == support.size(), "distribution: repeated support point");
}

MetricTable::MetricTable(std::vector<Cell> points, Matrix distances)
    : points_(std::move(points)), distances_(std::move(distances)) {
  const auto n = static_cast<Eigen::Index>(points_.size());
  require(distances_.rows() == n && distances_.cols() == n,
          "metric: table must be square over the point set");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(distances_(i, i) == 0.0, "metric: non-zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j)
      require(distances_(i, j) >= 0.0, "metric: negative distance");
    const bool fresh = index_.emplace(points_[static_cast<std::size_t>(i)], static_cast<int>(i)).second;
    require(fresh, "metric: repeated point");
  }
}

MetricTable MetricTable::from_grid(const GridSpec& spec) {
  const auto cells = spec.free_cells();
  const DistanceTable bfs(spec);
  const auto n = static_cast<Eigen::Index>(cells.size());
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int steps = bfs(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
      require(steps >= 0, "metric: grid has unreachable cell pairs");
      d(i, j) = steps;
    }
  }
  return MetricTable(cells, std::move(d));
}

int MetricTable::index(Cell c) const {
  const auto it = index_.find(c);
  require(it != index_.end(), "metric: point " + cell_str(c) + " not in table");
  return it->second;
}

double MetricTable::operator()(Cell a, Cell b) const {
  return distances_(index(a), index(b));
}

TransportResult exact_w1(const FiniteDistribution& mu, const FiniteDistribution& nu,
                         const MetricTable& metric) {
  mu.validate();
  nu.validate();
  const double mu_total = std::accumulate(mu.mass.begin(), mu.mass.end(), 0.0);
  const double nu_total = std::accumulate(nu.mass.begin(), nu.mass.end(), 0.0);
  require(std::abs(mu_total - nu_total) <= 1e-9, "exact_w1: marginal masses differ");

  const int n = static_cast<int>(mu.support.size());
  const int m = static_cast<int>(nu.support.size());
  Matrix cost(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) cost(i, j) = metric(mu.support[i], nu.support[j]);

  // Nodes: 0 = source, 1..n = sources of mu, n+1..n+m = targets of nu,
  // n+m+1 = sink.
  const int source = 0;
  const int sink = n + m + 1;
  const int nodes = n + m + 2;
  auto mu_node = [](int i) { return 1 + i; };
  auto nu_node = [n](int j) { return 1 + n + j; };

  std::vector<double> supply = mu.mass;
  std::vector<double> demand = nu.mass;
  Matrix flow = Matrix::Zero(n, m);
  std::vector<double> pot(nodes, 0.0);
  std::vector<double> dist(nodes);
  std::vector<int> parent(nodes);
  std::vector<char> done(nodes);

  auto reduced = [&](int u, int v, double c) { return std::max(0.0, c + pot[u] - pot[v]); };

  while (true) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    dist[source] = 0.0;
    for (int iter = 0; iter < nodes; ++iter) {
      int u = -1;
      for (int v = 0; v < nodes; ++v)
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      auto relax = [&](int v, double c) {
        const double nd = dist[u] + reduced(u, v, c);
        if (nd < dist[v]) {
          dist[v] = nd;
          parent[v] = u;
        }
      };
      if (u == source) {
        for (int i = 0; i < n; ++i)
          if (supply[i] > kMassTol) relax(mu_node(i), 0.0);
      } else if (u <= n) {
        const int i = u - 1;
        for (int j = 0; j < m; ++j) relax(nu_node(j), cost(i, j));
      } else if (u < sink) {
        const int j = u - 1 - n;
        for (int i = 0; i < n; ++i)
          if (flow(i, j) > kMassTol) relax(mu_node(i), -cost(i, j));
        if (demand[j] > kMassTol) relax(sink, 0.0);
      }
    }
    if (dist[sink] == kInf) break;

    // Bottleneck along the path sink <- ... <- source.
    double push = kInf;
    for (int v = sink; v != source; v = parent[v]) {
      const int u = parent[v];
      if (u == source) push = std::min(push, supply[v - 1]);
      else if (v == sink) push = std::min(push, demand[u - 1 - n]);
      else if (u > n) push = std::min(push, flow(v - 1, u - 1 - n));
    }
    for (int v = sink; v != source; v = parent[v]) {
      const int u = parent[v];
      if (u == source) supply[v - 1] -= push;
      else if (v == sink) demand[u - 1 - n] -= push;
      else if (u <= n) flow(u - 1, v - 1 - n) += push;
      else flow(v - 1, u - 1 - n) -= push;
    }
    for (int v = 0; v < nodes; ++v) pot[v] += std::min(dist[v], dist[sink]);
  }

  TransportResult out;
  out.cost = flow.cwiseProduct(cost).sum();
  out.plan.mass = std::move(flow);
  return out;
}

LipschitzViolation::LipschitzViolation(Cell a, Cell b, double diff, double dist)
    : ContractViolation("dual_gap: potential is not 1-Lipschitz on pair " + cell_str(a) +
                        " " + cell_str(b) + ": |f(a) - f(b)| = " + std::to_string(diff) +
                        " > d = " + std::to_string(dist)),
      first(a), second(b), difference(diff), distance(dist) {}

double dual_gap(const FiniteDistribution& mu, const FiniteDistribution& nu,
                const MetricTable& metric, const std::map<Cell, double>& f) {
  mu.validate();
  nu.validate();
  std::vector<Cell> joint(mu.support);
  joint.insert(joint.end(), nu.support.begin(), nu.support.end());
  std::sort(joint.begin(), joint.end());
  joint.erase(std::unique(joint.begin(), joint.end()), joint.end());
  auto value = [&](Cell c) {
    const auto it = f.find(c);
    require(it != f.end(), "dual_gap: potential missing at " + cell_str(c));
    return it->second;
  };
  constexpr double kLipTol = 1e-12;
  for (std::size_t a = 0; a < joint.size(); ++a) {
    for (std::size_t b = 0; b < joint.size(); ++b) {
      if (a == b) continue;
      const double diff = std::abs(value(joint[a]) - value(joint[b]));
      const double d = metric(joint[a], joint[b]);
      if (diff > d + kLipTol) throw LipschitzViolation(joint[a], joint[b], diff, d);
    }
  }
  double gap = 0.0;
  for (std::size_t j = 0; j < nu.support.size(); ++j) gap += nu.mass[j] * value(nu.support[j]);
  for (std::size_t i = 0; i < mu.support.size(); ++i) gap -= mu.mass[i] * value(mu.support[i]);
  return gap;
}

}  // namespace wic
