#include "wic/policy.hpp"

#include <cmath>

#include "input_batch.hpp"
#include "wic/discriminator.hpp"
#include "wic/errors.hpp"

namespace wic {

namespace {

void check_skill(int skill_count, SkillId w) {
  require(w.index >= 0 && w.index < skill_count,
          "skill " + std::to_string(w.index) + " out of range");
}

void check_aligned(std::span<const SkillEpisode> episodes,
                   std::span<const std::vector<double>> per_step) {
  require(per_step.size() == episodes.size(), "per-step values do not match episode count");
  for (std::size_t e = 0; e < episodes.size(); ++e)
    require(per_step[e].size() == episodes[e].actions.size(),
            "per-step values do not match episode length");
}

std::size_t total_steps(std::span<const SkillEpisode> episodes) {
  std::size_t n = 0;
  for (const auto& ep : episodes) n += ep.actions.size();
  require(n > 0, "batch holds no steps");
  return n;
}

}  // namespace

ActionTable::ActionTable(const GridSpec& spec, int skill_count,
                         std::vector<ActionProbs> probs)
    : width_(spec.width()), skill_count_(skill_count), probs_(std::move(probs)) {
  require(probs_.size() == static_cast<std::size_t>(spec.cell_count()) * skill_count,
          "ActionTable: wrong number of entries");
}

const ActionProbs& ActionTable::probs(Cell s, SkillId w) const {
  return probs_[static_cast<std::size_t>(s.row * width_ + s.col) * skill_count_ + w.index];
}

Action ActionTable::sample(Cell s, SkillId w, Rng& rng) const {
  return kAllActions[sample_categorical(probs(s, w), rng)];
}

SkillPolicyFn ActionTable::as_policy() const {
  return [this](Cell s, SkillId w, Rng& rng) { return sample(s, w, rng); };
}

SkillPolicy::SkillPolicy(const GridSpec& spec, ParamFunction net, int skill_count)
    : spec_(spec), net_(std::move(net)), skill_count_(skill_count) {
  require(skill_count >= 1, "SkillPolicy: skill count must be at least 1");
  require(net_.output_dim() == skill_count * kNumActions,
          "SkillPolicy: output_dim must equal K * |A|");
  require(net_.input_dim() == spec.feature_dim(),
          "SkillPolicy: input_dim must equal the feature dimension");
}

SkillPolicy SkillPolicy::zeros(const GridSpec& spec, Topology topology, int skill_count) {
  return SkillPolicy(spec, ParamFunction(topology, spec.feature_dim(), skill_count * kNumActions),
                     skill_count);
}

Vector SkillPolicy::logits(Cell s, SkillId w) const {
  check_skill(skill_count_, w);
  return net_.forward(Eigen::Map<const Vector>(featurize(spec_, s).data(), spec_.feature_dim()))
      .segment(static_cast<Eigen::Index>(w.index) * kNumActions, kNumActions);
}

ActionTable SkillPolicy::table() const {
  detail::InputBatch inputs(spec_, false);
  const auto cells = spec_.free_cells();
  for (const Cell& c : cells) inputs.add(c);
  const Matrix logits = net_.forward_batch(inputs.inputs());
  std::vector<ActionProbs> probs(static_cast<std::size_t>(spec_.cell_count()) * skill_count_,
                                 ActionProbs{});
  for (std::size_t j = 0; j < cells.size(); ++j) {
    for (int w = 0; w < skill_count_; ++w) {
      const Vector p = softmax(logits.col(static_cast<Eigen::Index>(j))
                                   .segment(static_cast<Eigen::Index>(w) * kNumActions, kNumActions));
      ActionProbs& dst =
          probs[static_cast<std::size_t>(spec_.index_of(cells[j])) * skill_count_ + w];
      for (int a = 0; a < kNumActions; ++a) dst[a] = p[a];
    }
  }
  return ActionTable(spec_, skill_count_, std::move(probs));
}

Vector action_distribution(const SkillPolicy& p, Cell s, SkillId w) {
  return softmax(p.logits(s, w));
}

Baseline::Baseline(const GridSpec& spec, ParamFunction net)
    : spec_(spec), net_(std::move(net)) {
  require(net_.output_dim() == 1, "Baseline: output_dim must be 1");
  require(net_.input_dim() == spec.feature_dim(),
          "Baseline: input_dim must equal the feature dimension");
}

Baseline Baseline::zeros(const GridSpec& spec, Topology topology) {
  return Baseline(spec, ParamFunction(topology, spec.feature_dim(), 1));
}

double Baseline::value(Cell s) const {
  return net_.forward(Eigen::Map<const Vector>(featurize(spec_, s).data(), spec_.feature_dim()))[0];
}

double entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::vector<std::vector<double>> rewards_to_go(std::span<const SkillEpisode> episodes) {
  std::vector<std::vector<double>> out;
  out.reserve(episodes.size());
  for (const auto& ep : episodes) {
    std::vector<double> g(ep.rewards.size(), 0.0);
    double acc = 0.0;
    for (std::size_t t = ep.rewards.size(); t-- > 0;) {
      acc += ep.rewards[t];
      g[t] = acc;
    }
    out.push_back(std::move(g));
  }
  return out;
}

LossValue reinforce_loss(const SkillPolicy& p, std::span<const SkillEpisode> episodes,
                         std::span<const std::vector<double>> advantages,
                         double entropy_weight) {
  require(!episodes.empty(), "reinforce_loss: empty batch");
  check_aligned(episodes, advantages);
  detail::InputBatch inputs(p.spec(), false);
  std::vector<std::vector<int>> cols(episodes.size());
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    check_skill(p.skill_count(), episodes[e].skill);
    for (std::size_t t = 0; t < episodes[e].actions.size(); ++t)
      cols[e].push_back(inputs.add(episodes[e].states[t]));
  }
  const Matrix x = inputs.inputs();
  const Matrix logits = p.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(logits.rows(), logits.cols());
  const double inv_n = 1.0 / static_cast<double>(total_steps(episodes));
  LossValue out;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const SkillEpisode& ep = episodes[e];
    const Eigen::Index block = static_cast<Eigen::Index>(ep.skill.index) * kNumActions;
    for (std::size_t t = 0; t < ep.actions.size(); ++t) {
      const int c = cols[e][t];
      const Vector logp = log_softmax(logits.col(c).segment(block, kNumActions));
      const Vector prob = logp.array().exp();
      const double h = -(prob.array() * logp.array()).sum();
      const int a = static_cast<int>(ep.actions[t]);
      const double adv = advantages[e][t];
      out.value -= inv_n * (adv * logp[a] + entropy_weight * h);
      // d ln pi(a)/dz = e_a - p ;  dH/dz = -p * (ln p + H)
      Vector dz = -adv * prob;
      dz[a] += adv;
      dz.array() -= entropy_weight * prob.array() * (logp.array() + h);
      upstream.col(c).segment(block, kNumActions) -= inv_n * dz;
    }
  }
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(p.net().param_count()));
  p.net().accumulate_gradient(x, upstream, out.gradient);
  return out;
}

LossValue baseline_loss(const Baseline& b, std::span<const SkillEpisode> episodes,
                        std::span<const std::vector<double>> targets) {
  require(!episodes.empty(), "baseline_loss: empty batch");
  check_aligned(episodes, targets);
  detail::InputBatch inputs(b.spec(), false);
  std::vector<std::vector<int>> cols(episodes.size());
  for (std::size_t e = 0; e < episodes.size(); ++e)
    for (std::size_t t = 0; t < episodes[e].actions.size(); ++t)
      cols[e].push_back(inputs.add(episodes[e].states[t]));
  const Matrix x = inputs.inputs();
  const Matrix v = b.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(1, v.cols());
  const double inv_n = 1.0 / static_cast<double>(total_steps(episodes));
  LossValue out;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    for (std::size_t t = 0; t < cols[e].size(); ++t) {
      const int c = cols[e][t];
      const double err = v(0, c) - targets[e][t];
      out.value += inv_n * err * err;
      upstream(0, c) += inv_n * 2.0 * err;
    }
  }
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(b.net().param_count()));
  b.net().accumulate_gradient(x, upstream, out.gradient);
  return out;
}

ReinforceReport reinforce_update(SkillPolicy& p, Baseline& b,
                                 std::span<const SkillEpisode> episodes,
                                 double entropy_weight, Optimizer& policy_opt,
                                 Optimizer& baseline_opt) {
  require(!episodes.empty(), "reinforce_update: empty batch");
  const auto returns = rewards_to_go(episodes);

  // Baseline values for every visited state in one pass.
  detail::InputBatch inputs(b.spec(), false);
  std::vector<std::vector<int>> cols(episodes.size());
  for (std::size_t e = 0; e < episodes.size(); ++e)
    for (std::size_t t = 0; t < episodes[e].actions.size(); ++t)
      cols[e].push_back(inputs.add(episodes[e].states[t]));
  const Matrix x = inputs.inputs();
  const Matrix values = b.net().forward_batch(x);
  const Matrix logits = p.net().forward_batch(x);

  ReinforceReport report;
  std::vector<std::vector<double>> advantages(episodes.size());
  double entropy_sum = 0.0;
  std::size_t steps = 0;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const SkillEpisode& ep = episodes[e];
    check_skill(p.skill_count(), ep.skill);
    if (!returns[e].empty()) report.mean_return += returns[e].front();
    for (std::size_t t = 0; t < cols[e].size(); ++t) {
      const int c = cols[e][t];
      advantages[e].push_back(returns[e][t] - values(0, c));
      const Vector probs = softmax(logits.col(c).segment(
          static_cast<Eigen::Index>(ep.skill.index) * kNumActions, kNumActions));
      entropy_sum += entropy(std::span<const double>(probs.data(), kNumActions));
      ++steps;
    }
  }
  report.mean_return /= static_cast<double>(episodes.size());
  report.mean_entropy = steps ? entropy_sum / static_cast<double>(steps) : 0.0;

  const LossValue pl = reinforce_loss(p, episodes, advantages, entropy_weight);
  const LossValue bl = baseline_loss(b, episodes, returns);
  policy_opt.apply(p.net().params(), pl.gradient);
  baseline_opt.apply(b.net().params(), bl.gradient);
  report.baseline_loss = bl.value;
  return report;
}

}  // namespace wic
