#pragma once

#include <span>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"
#include "wic/skill_runtime.hpp"

namespace wic {

struct WicConfig {
  // Weight of the overlap penalty against the best competing skill, in [0, 1].
  double eta = 0.9;
  // Multiplier on the Lipschitz hinge when combined with the potential loss.
  // 0 removes the constraint; experiment configs require a positive value.
  double lipschitz_weight = 10.0;
  // Visitation samples drawn per episode for the potential loss.
  int batch_size = 16;

  void validate() const;
};

// Per-skill potentials f(s, s0, w), realized as one network over
// featurize(s) ++ featurize(s0) with one output head per skill.
class PotentialBank {
 public:
  PotentialBank(const GridSpec& spec, ParamFunction net, int skill_count);

  // Network with all-zero parameters.
  static PotentialBank zeros(const GridSpec& spec, Topology topology, int skill_count);

  int skill_count() const { return skill_count_; }
  const GridSpec& spec() const { return spec_; }
  ParamFunction& net() { return net_; }
  const ParamFunction& net() const { return net_; }

  Vector input(Cell s, Cell s0) const;

  double potential(Cell s, Cell s0, SkillId w) const;
  // All K heads at once.
  Vector potentials(Cell s, Cell s0) const;

 private:
  GridSpec spec_;
  ParamFunction net_;
  int skill_count_;
};

struct LossValue {
  double value = 0.0;
  Vector gradient;
};

struct Transition {
  Cell from;
  Cell to;
};

std::vector<Transition> episode_transitions(const SkillEpisode& episode);

// f(s0, s0, w) - mean_i f(s_i, s0, w) over a batch that shares (s0, w).
LossValue potential_loss(const PotentialBank& bank,
                         std::span<const VisitationSample> batch);

// mean over pairs of max((f(s', s0, w) - f(s, s0, w))^2 - 1, 0).
LossValue lipschitz_penalty(const PotentialBank& bank,
                            std::span<const Transition> pairs, Cell s0,
                            SkillId w);

struct PotentialLossReport {
  double potential_loss = 0.0;
  double lipschitz_loss = 0.0;
};

// Total objective sum_w mean_{episodes of w} [L_f + lipschitz_weight * L_c]
// over the skills present; value and gradient without updating.
LossValue potential_objective(const PotentialBank& bank,
                              std::span<const SkillEpisode> episodes,
                              const WicConfig& cfg, Rng& rng,
                              PotentialLossReport* report = nullptr);

// One optimizer step on potential_objective. Visitation samples come from
// `rng`; Lipschitz pairs are every consecutive transition of each episode.
PotentialLossReport train_potential_step(PotentialBank& bank,
                                         std::span<const SkillEpisode> episodes,
                                         const WicConfig& cfg, Optimizer& opt,
                                         Rng& rng);

// [f(s1,s0,w) - f(s,s0,w)] - eta * max_{w' != w} [f(s1,s0,w') - f(s,s0,w')].
// With a single skill the penalty term is 0.
double wic_reward(const PotentialBank& bank, Cell s, Cell s1, Cell s0,
                  SkillId w, double eta);

void label_episode_rewards(const PotentialBank& bank, SkillEpisode& episode,
                           double eta);
// Same as above for many episodes with a single batched network pass.
void label_episode_rewards(const PotentialBank& bank,
                           std::span<SkillEpisode> episodes, double eta);

}  // namespace wic
