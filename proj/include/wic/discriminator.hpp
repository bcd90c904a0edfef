#pragma once

#include <span>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"
#include "wic/potential.hpp"
#include "wic/skill_runtime.hpp"

namespace wic {

// Classifier D(w | s_T, s0) over featurize(s_T) ++ featurize(s0) -> K logits.
class Discriminator {
 public:
  Discriminator(const GridSpec& spec, ParamFunction net, int skill_count);

  static Discriminator zeros(const GridSpec& spec, Topology topology, int skill_count);

  int skill_count() const { return skill_count_; }
  const GridSpec& spec() const { return spec_; }
  ParamFunction& net() { return net_; }
  const ParamFunction& net() const { return net_; }

  Vector logits(Cell end, Cell start) const;

 private:
  GridSpec spec_;
  ParamFunction net_;
  int skill_count_;
};

// Numerically stable softmax and log-softmax.
Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);

Vector skill_posterior(const Discriminator& d, Cell end, Cell start);

struct EndpointSample {
  Cell end;
  Cell start;
  SkillId skill;
};

EndpointSample endpoint_of(const SkillEpisode& episode);

// Mean negative log-likelihood of the true skill.
LossValue discriminator_loss(const Discriminator& d,
                             std::span<const EndpointSample> batch);

// Fraction of the batch whose arg-max posterior is the true skill.
double discriminator_accuracy(const Discriminator& d,
                              std::span<const EndpointSample> batch);

double train_discriminator_step(Discriminator& d,
                                std::span<const EndpointSample> batch,
                                Optimizer& opt);

// log D(w | s_T, s0) + log K: the terminal intrinsic reward of an episode.
double vic_reward(const Discriminator& d, const SkillEpisode& episode);

// Places vic_reward on the last step; all earlier rewards are 0.
void label_vic_rewards(const Discriminator& d, std::span<SkillEpisode> episodes);

}  // namespace wic
