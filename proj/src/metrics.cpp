#include "wic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "input_batch.hpp"
#include "wic/errors.hpp"

namespace wic {

int episodic_coverage(const SkillEpisode& episode) {
  return static_cast<int>(std::set<Cell>(episode.states.begin(), episode.states.end()).size());
}

LifetimeCoverage::LifetimeCoverage(const GridSpec& spec)
    : width_(spec.width()), seen_(static_cast<std::size_t>(spec.cell_count()), false) {}

void LifetimeCoverage::add(const SkillEpisode& episode) {
  for (const Cell& c : episode.states) {
    const auto i = static_cast<std::size_t>(c.row * width_ + c.col);
    if (!seen_[i]) {
      seen_[i] = true;
      ++count_;
    }
  }
}

std::vector<EndpointRow> endpoint_report(const GridSpec& spec, const SkillPolicyFn& policy,
                                         int skill_count, int horizon, int n_rollouts,
                                         Rng& rng) {
  require(skill_count >= 1, "endpoint_report: skill count must be at least 1");
  const auto dist = bfs_distances_from(spec, spec.start());
  std::vector<EndpointRow> rows;
  rows.reserve(static_cast<std::size_t>(skill_count) * std::max(n_rollouts, 0));
  for (int w = 0; w < skill_count; ++w) {
    for (int r = 0; r < n_rollouts; ++r) {
      const SkillEpisode ep =
          run_skill_episode(spec, policy, SkillId{w}, spec.start(), horizon, rng);
      rows.push_back({SkillId{w}, ep.end(), dist[spec.index_of(ep.end())]});
    }
  }
  return rows;
}

std::vector<EndpointRow> endpoint_report(const SkillPolicy& policy, int horizon,
                                         int n_rollouts, Rng& rng) {
  const ActionTable table = policy.table();
  return endpoint_report(policy.spec(), table.as_policy(), policy.skill_count(), horizon,
                         n_rollouts, rng);
}

double mean_endpoint_distance(const std::vector<EndpointRow>& rows) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& r : rows) sum += r.distance;
  return sum / static_cast<double>(rows.size());
}

std::vector<std::array<double, 2>> mean_displacements(const std::vector<EndpointRow>& rows,
                                                      Cell start, int skill_count) {
  std::vector<std::array<double, 2>> sums(skill_count, {0.0, 0.0});
  std::vector<int> counts(skill_count, 0);
  for (const auto& r : rows) {
    require(r.skill.index >= 0 && r.skill.index < skill_count,
            "mean_displacements: skill out of range");
    sums[r.skill.index][0] += r.end.col - start.col;
    sums[r.skill.index][1] += r.end.row - start.row;
    ++counts[r.skill.index];
  }
  for (int w = 0; w < skill_count; ++w) {
    if (counts[w] == 0) continue;
    sums[w][0] /= counts[w];
    sums[w][1] /= counts[w];
  }
  return sums;
}

double min_pairwise_angle_deg(const std::vector<std::array<double, 2>>& vectors) {
  double best = 180.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const double ni = std::hypot(vectors[i][0], vectors[i][1]);
      const double nj = std::hypot(vectors[j][0], vectors[j][1]);
      if (ni == 0.0 || nj == 0.0) return 0.0;
      const double cosine =
          std::clamp((vectors[i][0] * vectors[j][0] + vectors[i][1] * vectors[j][1]) / (ni * nj),
                     -1.0, 1.0);
      best = std::min(best, std::acos(cosine) * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

int four_rooms_quadrant(const GridSpec& spec, Cell c) {
  const int mid_row = spec.height() / 2;
  const int mid_col = spec.width() / 2;
  if (c.row == mid_row || c.col == mid_col) return -1;
  return (c.row > mid_row ? 2 : 0) + (c.col > mid_col ? 1 : 0);
}

double fraction_outside_start_room(const GridSpec& spec, const std::vector<EndpointRow>& rows) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  const int home = four_rooms_quadrant(spec, spec.start());
  int outside = 0;
  for (const auto& r : rows)
    if (four_rooms_quadrant(spec, r.end) != home) ++outside;
  return static_cast<double>(outside) / static_cast<double>(rows.size());
}

namespace {

template <typename Fill>
std::vector<Matrix> grid_maps(const GridSpec& spec, int skill_count, const Matrix& out,
                              const std::vector<Cell>& cells, Fill fill) {
  std::vector<Matrix> maps(skill_count, Matrix::Constant(spec.height(), spec.width(),
                                                         std::numeric_limits<double>::quiet_NaN()));
  for (int w = 0; w < skill_count; ++w)
    for (std::size_t j = 0; j < cells.size(); ++j)
      maps[w](cells[j].row, cells[j].col) = fill(out, static_cast<Eigen::Index>(j), w);
  return maps;
}

}  // namespace

std::vector<Matrix> reward_heatmap(const PotentialBank& bank, Cell s0) {
  const auto cells = bank.spec().free_cells();
  detail::InputBatch inputs(bank.spec(), true);
  for (const Cell& c : cells) inputs.add(c, s0);
  const Eigen::Index origin = inputs.add(s0, s0);
  const Matrix f = bank.net().forward_batch(inputs.inputs());
  return grid_maps(bank.spec(), bank.skill_count(), f, cells,
                   [origin](const Matrix& m, Eigen::Index j, int w) {
                     return m(w, j) - m(w, origin);
                   });
}

std::vector<Matrix> reward_heatmap(const Discriminator& d, Cell s0) {
  const auto cells = d.spec().free_cells();
  detail::InputBatch inputs(d.spec(), true);
  for (const Cell& c : cells) inputs.add(c, s0);
  const Matrix logits = d.net().forward_batch(inputs.inputs());
  Matrix logp(logits.rows(), logits.cols());
  for (Eigen::Index j = 0; j < logits.cols(); ++j) logp.col(j) = log_softmax(logits.col(j));
  const double log_k = std::log(static_cast<double>(d.skill_count()));
  return grid_maps(d.spec(), d.skill_count(), logp, cells,
                   [log_k](const Matrix& m, Eigen::Index j, int w) { return m(w, j) + log_k; });
}

}  // namespace wic
