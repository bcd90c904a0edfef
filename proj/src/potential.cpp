#include "wic/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "input_batch.hpp"
#include "wic/errors.hpp"

namespace wic {

namespace {

void check_skill(const PotentialBank& bank, SkillId w) {
  require(w.index >= 0 && w.index < bank.skill_count(),
          "skill " + std::to_string(w.index) + " out of range [0, " +
              std::to_string(bank.skill_count()) + ")");
}

// Adds scale * L_f for one episode's samples to `upstream` and returns L_f.
double add_potential_terms(const Matrix& f, Matrix& upstream, int start_col,
                           std::span<const int> sample_cols, int w, double scale) {
  const double inv_n = 1.0 / static_cast<double>(sample_cols.size());
  double mean = 0.0;
  for (int c : sample_cols) mean += f(w, c);
  mean *= inv_n;
  upstream(w, start_col) += scale;
  for (int c : sample_cols) upstream(w, c) -= scale * inv_n;
  return f(w, start_col) - mean;
}

// Adds scale * L_c for one episode's transition pairs and returns L_c.
double add_lipschitz_terms(const Matrix& f, Matrix& upstream,
                           std::span<const std::pair<int, int>> pair_cols, int w,
                           double scale) {
  const double inv_n = 1.0 / static_cast<double>(pair_cols.size());
  double total = 0.0;
  for (const auto& [from, to] : pair_cols) {
    const double diff = f(w, to) - f(w, from);
    const double excess = diff * diff - 1.0;
    if (excess <= 0.0) continue;
    total += excess;
    upstream(w, to) += scale * inv_n * 2.0 * diff;
    upstream(w, from) -= scale * inv_n * 2.0 * diff;
  }
  return total * inv_n;
}

}  // namespace

void WicConfig::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta: must lie in [0, 1]");
  if (!(lipschitz_weight >= 0.0)) throw ConfigError("lipschitz_weight: must be non-negative");
  if (batch_size < 1) throw ConfigError("batch_size: must be at least 1");
}

PotentialBank::PotentialBank(const GridSpec& spec, ParamFunction net, int skill_count)
    : spec_(spec), net_(std::move(net)), skill_count_(skill_count) {
  require(skill_count >= 1, "PotentialBank: skill count must be at least 1");
  require(net_.output_dim() == skill_count, "PotentialBank: output_dim must equal K");
  require(net_.input_dim() == 2 * spec.feature_dim(),
          "PotentialBank: input_dim must be twice the feature dimension");
}

PotentialBank PotentialBank::zeros(const GridSpec& spec, Topology topology,
                                   int skill_count) {
  return PotentialBank(spec, ParamFunction(topology, 2 * spec.feature_dim(), skill_count),
                       skill_count);
}

Vector PotentialBank::input(Cell s, Cell s0) const {
  detail::InputBatch batch(spec_, true);
  batch.add(s, s0);
  return batch.inputs().col(0);
}

double PotentialBank::potential(Cell s, Cell s0, SkillId w) const {
  check_skill(*this, w);
  return potentials(s, s0)[w.index];
}

Vector PotentialBank::potentials(Cell s, Cell s0) const {
  return net_.forward(input(s, s0));
}

std::vector<Transition> episode_transitions(const SkillEpisode& episode) {
  std::vector<Transition> out;
  out.reserve(episode.actions.size());
  for (std::size_t t = 0; t + 1 < episode.states.size(); ++t)
    out.push_back({episode.states[t], episode.states[t + 1]});
  return out;
}

LossValue potential_loss(const PotentialBank& bank,
                         std::span<const VisitationSample> batch) {
  require(!batch.empty(), "potential_loss: empty batch");
  const Cell s0 = batch.front().start;
  const SkillId w = batch.front().skill;
  check_skill(bank, w);
  detail::InputBatch inputs(bank.spec(), true);
  const int start_col = inputs.add(s0, s0);
  std::vector<int> cols;
  cols.reserve(batch.size());
  for (const auto& s : batch) {
    require(s.start == s0 && s.skill == w,
            "potential_loss: samples must share start state and skill");
    cols.push_back(inputs.add(s.state, s0));
  }
  const Matrix x = inputs.inputs();
  const Matrix f = bank.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(f.rows(), f.cols());
  LossValue out;
  out.value = add_potential_terms(f, upstream, start_col, cols, w.index, 1.0);
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(bank.net().param_count()));
  bank.net().accumulate_gradient(x, upstream, out.gradient);
  return out;
}

LossValue lipschitz_penalty(const PotentialBank& bank,
                            std::span<const Transition> pairs, Cell s0,
                            SkillId w) {
  require(!pairs.empty(), "lipschitz_penalty: empty pair set");
  check_skill(bank, w);
  detail::InputBatch inputs(bank.spec(), true);
  std::vector<std::pair<int, int>> cols;
  cols.reserve(pairs.size());
  for (const auto& p : pairs) cols.emplace_back(inputs.add(p.from, s0), inputs.add(p.to, s0));
  const Matrix x = inputs.inputs();
  const Matrix f = bank.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(f.rows(), f.cols());
  LossValue out;
  out.value = add_lipschitz_terms(f, upstream, cols, w.index, 1.0);
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(bank.net().param_count()));
  bank.net().accumulate_gradient(x, upstream, out.gradient);
  return out;
}

LossValue potential_objective(const PotentialBank& bank,
                              std::span<const SkillEpisode> episodes,
                              const WicConfig& cfg, Rng& rng,
                              PotentialLossReport* report) {
  require(!episodes.empty(), "train_potential_step: no episodes");
  cfg.validate();

  struct EpisodeCols {
    int skill;
    int start_col;
    std::vector<int> samples;
    std::vector<std::pair<int, int>> pairs;
  };
  detail::InputBatch inputs(bank.spec(), true);
  std::vector<EpisodeCols> plan;
  plan.reserve(episodes.size());
  std::map<int, int> per_skill;
  for (const SkillEpisode& ep : episodes) {
    check_skill(bank, ep.skill);
    EpisodeCols cols{ep.skill.index, inputs.add(ep.start, ep.start), {}, {}};
    for (const auto& s : visitation_samples(ep, cfg.batch_size, rng))
      cols.samples.push_back(inputs.add(s.state, ep.start));
    for (const auto& p : episode_transitions(ep))
      cols.pairs.emplace_back(inputs.add(p.from, ep.start), inputs.add(p.to, ep.start));
    ++per_skill[ep.skill.index];
    plan.push_back(std::move(cols));
  }

  const Matrix x = inputs.inputs();
  const Matrix f = bank.net().forward_batch(x);
  Matrix upstream = Matrix::Zero(f.rows(), f.cols());
  PotentialLossReport rep;
  for (const EpisodeCols& cols : plan) {
    const double scale = 1.0 / per_skill[cols.skill];
    rep.potential_loss +=
        scale * add_potential_terms(f, upstream, cols.start_col, cols.samples, cols.skill, scale);
    rep.lipschitz_loss += scale * add_lipschitz_terms(f, upstream, cols.pairs, cols.skill,
                                                      scale * cfg.lipschitz_weight);
  }
  LossValue out;
  out.value = rep.potential_loss + cfg.lipschitz_weight * rep.lipschitz_loss;
  out.gradient = Vector::Zero(static_cast<Eigen::Index>(bank.net().param_count()));
  bank.net().accumulate_gradient(x, upstream, out.gradient);
  if (report) *report = rep;
  return out;
}

PotentialLossReport train_potential_step(PotentialBank& bank,
                                         std::span<const SkillEpisode> episodes,
                                         const WicConfig& cfg, Optimizer& opt,
                                         Rng& rng) {
  PotentialLossReport report;
  const LossValue loss = potential_objective(bank, episodes, cfg, rng, &report);
  opt.apply(bank.net().params(), loss.gradient);
  return report;
}

namespace {

double reward_from_columns(const Matrix& f, int before, int after, int w, double eta) {
  const double own = f(w, after) - f(w, before);
  double best_other = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < f.rows(); ++k)
    if (k != w) best_other = std::max(best_other, f(k, after) - f(k, before));
  if (f.rows() == 1) return own;
  return own - eta * best_other;
}

}  // namespace

double wic_reward(const PotentialBank& bank, Cell s, Cell s1, Cell s0,
                  SkillId w, double eta) {
  check_skill(bank, w);
  require(eta >= 0.0 && eta <= 1.0, "wic_reward: eta must lie in [0, 1]");
  detail::InputBatch inputs(bank.spec(), true);
  const int a = inputs.add(s, s0);
  const int b = inputs.add(s1, s0);
  const Matrix f = bank.net().forward_batch(inputs.inputs());
  return reward_from_columns(f, a, b, w.index, eta);
}

void label_episode_rewards(const PotentialBank& bank, SkillEpisode& episode,
                           double eta) {
  label_episode_rewards(bank, std::span<SkillEpisode>(&episode, 1), eta);
}

void label_episode_rewards(const PotentialBank& bank,
                           std::span<SkillEpisode> episodes, double eta) {
  require(eta >= 0.0 && eta <= 1.0, "label_episode_rewards: eta must lie in [0, 1]");
  detail::InputBatch inputs(bank.spec(), true);
  std::vector<std::vector<int>> cols(episodes.size());
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    check_skill(bank, episodes[e].skill);
    for (const Cell& s : episodes[e].states)
      cols[e].push_back(inputs.add(s, episodes[e].start));
  }
  if (inputs.size() == 0) return;
  const Matrix f = bank.net().forward_batch(inputs.inputs());
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    SkillEpisode& ep = episodes[e];
    ep.rewards.assign(ep.actions.size(), 0.0);
    for (std::size_t t = 0; t < ep.actions.size(); ++t)
      ep.rewards[t] = reward_from_columns(f, cols[e][t], cols[e][t + 1], ep.skill.index, eta);
  }
}

}  // namespace wic
