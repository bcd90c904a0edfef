#pragma once

#include <array>
#include <span>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"
#include "wic/potential.hpp"
#include "wic/skill_runtime.hpp"

namespace wic {

using ActionProbs = std::array<double, kNumActions>;

// Per-(cell, skill) action probabilities frozen from a policy snapshot.
// Rollouts sample from the table instead of re-running the network per step.
class ActionTable {
 public:
  ActionTable(const GridSpec& spec, int skill_count, std::vector<ActionProbs> probs);

  const ActionProbs& probs(Cell s, SkillId w) const;
  Action sample(Cell s, SkillId w, Rng& rng) const;
  // Callable view; the table must outlive it.
  SkillPolicyFn as_policy() const;

 private:
  int width_;
  int skill_count_;
  std::vector<ActionProbs> probs_;  // [cell index * K + skill]
};

// Softmax policy: featurize(s) -> K blocks of |A| logits, one block per skill.
class SkillPolicy {
 public:
  SkillPolicy(const GridSpec& spec, ParamFunction net, int skill_count);

  static SkillPolicy zeros(const GridSpec& spec, Topology topology, int skill_count);

  int skill_count() const { return skill_count_; }
  const GridSpec& spec() const { return spec_; }
  ParamFunction& net() { return net_; }
  const ParamFunction& net() const { return net_; }

  Vector logits(Cell s, SkillId w) const;
  ActionTable table() const;

 private:
  GridSpec spec_;
  ParamFunction net_;
  int skill_count_;
};

Vector action_distribution(const SkillPolicy& p, Cell s, SkillId w);

// State-value baseline b(s); skill-agnostic.
class Baseline {
 public:
  Baseline(const GridSpec& spec, ParamFunction net);

  static Baseline zeros(const GridSpec& spec, Topology topology);

  const GridSpec& spec() const { return spec_; }
  ParamFunction& net() { return net_; }
  const ParamFunction& net() const { return net_; }

  double value(Cell s) const;

 private:
  GridSpec spec_;
  ParamFunction net_;
};

// -sum p_i ln p_i with 0 ln 0 = 0.
double entropy(std::span<const double> dist);

// Undiscounted reward-to-go G_t = sum_{k >= t} r_k within each episode.
std::vector<std::vector<double>> rewards_to_go(std::span<const SkillEpisode> episodes);

// Negated REINFORCE surrogate with advantages held fixed:
//   L = -(1/N) sum_episodes sum_t [A_t ln pi(a_t|s_t,w) + entropy_weight H(pi(.|s_t,w))]
// where N is the total number of steps in the batch.
LossValue reinforce_loss(const SkillPolicy& p, std::span<const SkillEpisode> episodes,
                         std::span<const std::vector<double>> advantages,
                         double entropy_weight);

// (1/N) sum_episodes sum_t (b(s_t) - target_t)^2, N the total number of steps.
LossValue baseline_loss(const Baseline& b, std::span<const SkillEpisode> episodes,
                        std::span<const std::vector<double>> targets);

struct ReinforceReport {
  double mean_return = 0.0;
  double baseline_loss = 0.0;
  double mean_entropy = 0.0;
};

// Advantages A_t = G_t - b(s_t) from the current baseline, then one optimizer
// step for the policy and one for the baseline (regressed onto G_t).
ReinforceReport reinforce_update(SkillPolicy& p, Baseline& b,
                                 std::span<const SkillEpisode> episodes,
                                 double entropy_weight, Optimizer& policy_opt,
                                 Optimizer& baseline_opt);

}  // namespace wic
