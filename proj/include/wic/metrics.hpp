#pragma once

#include <array>
#include <vector>

#include "wic/discriminator.hpp"
#include "wic/gridworld.hpp"
#include "wic/policy.hpp"
#include "wic/potential.hpp"
#include "wic/skill_runtime.hpp"

namespace wic {

// Distinct states among s_0..s_T.
int episodic_coverage(const SkillEpisode& episode);

// Distinct states ever visited across all episodes added so far.
class LifetimeCoverage {
 public:
  explicit LifetimeCoverage(const GridSpec& spec);

  void add(const SkillEpisode& episode);
  int count() const { return count_; }

 private:
  int width_;
  std::vector<bool> seen_;
  int count_ = 0;
};

struct EndpointRow {
  SkillId skill;
  Cell end;
  int distance = 0;  // BFS steps from the start cell

  friend bool operator==(const EndpointRow&, const EndpointRow&) = default;
};

// n_rollouts evaluation episodes per skill, each from spec.start().
std::vector<EndpointRow> endpoint_report(const GridSpec& spec, const SkillPolicyFn& policy,
                                         int skill_count, int horizon, int n_rollouts,
                                         Rng& rng);
std::vector<EndpointRow> endpoint_report(const SkillPolicy& policy, int horizon,
                                         int n_rollouts, Rng& rng);

double mean_endpoint_distance(const std::vector<EndpointRow>& rows);

// Mean (d_col, d_row) displacement of each skill's endpoints from `start`.
std::vector<std::array<double, 2>> mean_displacements(const std::vector<EndpointRow>& rows,
                                                      Cell start, int skill_count);

// Smallest angle in degrees between any two displacement vectors. A zero
// vector makes the angle undefined and yields 0.
double min_pairwise_angle_deg(const std::vector<std::array<double, 2>>& vectors);

// Four-rooms quadrant of a cell: 0 top-left, 1 top-right, 2 bottom-left,
// 3 bottom-right; -1 for cells on the dividing walls (doorways).
int four_rooms_quadrant(const GridSpec& spec, Cell c);

// Fraction of endpoints not inside the quadrant that contains spec.start().
double fraction_outside_start_room(const GridSpec& spec, const std::vector<EndpointRow>& rows);

// Per-skill reward maps over the grid (height x width, NaN on walls).
// WIC: f(s, s0, w) - f(s0, s0, w). VIC: log D(w | s, s0) + log K.
std::vector<Matrix> reward_heatmap(const PotentialBank& bank, Cell s0);
std::vector<Matrix> reward_heatmap(const Discriminator& d, Cell s0);

}  // namespace wic
