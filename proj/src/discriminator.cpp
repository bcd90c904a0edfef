#include "wic/discriminator.hpp"

#include <cmath>

#include "input_batch.hpp"
#include "wic/errors.hpp"

namespace wic {

Discriminator::Discriminator(const GridSpec& spec, ParamFunction net, int skill_count)
    : spec_(spec), net_(std::move(net)), skill_count_(skill_count) {
  require(skill_count >= 1, "Discriminator: skill count must be at least 1");
  require(net_.output_dim() == skill_count, "Discriminator: output_dim must equal K");
  require(net_.input_dim() == 2 * spec.feature_dim(),
          "Discriminator: input_dim must be twice the feature dimension");
}

Discriminator Discriminator::zeros(const GridSpec& spec, Topology topology,
                                   int skill_count) {
  return Discriminator(spec, ParamFunction(topology, 2 * spec.feature_dim(), skill_count),
                       skill_count);
}

Vector Discriminator::logits(Cell end, Cell start) const {
  detail::InputBatch inputs(spec_, true);
  inputs.add(end, start);
  return net_.forward(inputs.inputs().col(0));
}

Vector log_softmax(const Vector& logits) {
  const double peak = logits.maxCoeff();
  const double lse = peak + std::log((logits.array() - peak).exp().sum());
  return logits.array() - lse;
}

Vector softmax(const Vector& logits) {
  Vector p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

Vector skill_posterior(const Discriminator& d, Cell end, Cell start) {
  return softmax(d.logits(end, start));
}

EndpointSample endpoint_of(const SkillEpisode& episode) {
  return {episode.end(), episode.start, episode.skill};
}

LossValue discriminator_loss(const Discriminator& d,
                             std::span<const EndpointSample> batch) {
  require(!batch.empty(), "discriminator_loss: empty batch");
  detail::InputBatch inputs(d.spec(), true);
  std::vector<int> cols;
  cols.reserve(batch.size());
  for (const auto& s : batch) {
    require(s.skill.index >= 0 && s.skill.index < d.skill_count(),
            "discriminator_loss: skill out of range");
    cols.push_back(inputs.add(s.end, s.start));
  }
  const Matrix x = inputs.inputs();
  const Matrix logits = d.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(logits.rows(), logits.cols());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossValue out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int c = cols[i];
    const Vector logp = log_softmax(logits.col(c));
    const int w = batch[i].skill.index;
    out.value -= inv_n * logp[w];
    // d(-log p_w)/d logits = softmax - e_w
    upstream.col(c) += inv_n * logp.array().exp().matrix();
    upstream(w, c) -= inv_n;
  }
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(d.net().param_count()));
  d.net().accumulate_gradient(x, upstream, out.gradient);
  return out;
}

double discriminator_accuracy(const Discriminator& d,
                              std::span<const EndpointSample> batch) {
  require(!batch.empty(), "discriminator_accuracy: empty batch");
  int hits = 0;
  for (const auto& s : batch) {
    Eigen::Index best = 0;
    d.logits(s.end, s.start).maxCoeff(&best);
    if (best == s.skill.index) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

double train_discriminator_step(Discriminator& d,
                                std::span<const EndpointSample> batch,
                                Optimizer& opt) {
  const LossValue loss = discriminator_loss(d, batch);
  opt.apply(d.net().params(), loss.gradient);
  return loss.value;
}

double vic_reward(const Discriminator& d, const SkillEpisode& episode) {
  require(episode.skill.index >= 0 && episode.skill.index < d.skill_count(),
          "vic_reward: skill out of range");
  const Vector logp = log_softmax(d.logits(episode.end(), episode.start));
  return logp[episode.skill.index] + std::log(static_cast<double>(d.skill_count()));
}

void label_vic_rewards(const Discriminator& d, std::span<SkillEpisode> episodes) {
  detail::InputBatch inputs(d.spec(), true);
  std::vector<int> cols;
  cols.reserve(episodes.size());
  for (const auto& ep : episodes) {
    require(ep.skill.index >= 0 && ep.skill.index < d.skill_count(),
            "label_vic_rewards: skill out of range");
    cols.push_back(inputs.add(ep.end(), ep.start));
  }
  if (inputs.size() == 0) return;
  const Matrix logits = d.net().forward_batch(inputs.inputs());
  const double log_k = std::log(static_cast<double>(d.skill_count()));
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    SkillEpisode& ep = episodes[e];
    ep.rewards.assign(ep.actions.size(), 0.0);
    if (ep.rewards.empty()) continue;
    const Vector logp = log_softmax(logits.col(cols[e]));
    ep.rewards.back() = logp[ep.skill.index] + log_k;
  }
}

}  // namespace wic
