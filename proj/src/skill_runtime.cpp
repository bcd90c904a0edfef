#include "wic/skill_runtime.hpp"

#include <sstream>

#include "wic/errors.hpp"

namespace wic {

SkillId sample_skill(Rng& rng, int skill_count) {
  if (skill_count < 1) throw ConfigError("K: skill count must be at least 1");
  return SkillId{static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(skill_count)))};
}

SkillEpisode run_skill_episode(const GridSpec& spec, const SkillPolicyFn& policy,
                               SkillId skill, Cell s0, int horizon, Rng& rng) {
  require(horizon >= 1, "run_skill_episode: T must be at least 1");
  require(spec.is_free(s0), "run_skill_episode: invalid start state");
  SkillEpisode ep;
  ep.skill = skill;
  ep.start = s0;
  ep.states.reserve(horizon + 1);
  ep.actions.reserve(horizon);
  ep.states.push_back(s0);
  Cell s = s0;
  for (int t = 0; t < horizon; ++t) {
    const Action a = policy(s, skill, rng);
    s = step(spec, s, a);
    ep.actions.push_back(a);
    ep.states.push_back(s);
  }
  ep.rewards.assign(horizon, 0.0);
  return ep;
}

bool replay_matches(const GridSpec& spec, const SkillEpisode& episode) {
  const std::size_t T = episode.actions.size();
  if (episode.states.size() != T + 1 || episode.rewards.size() != T) return false;
  if (episode.states.front() != episode.start) return false;
  Cell s = episode.start;
  for (std::size_t t = 0; t < T; ++t) {
    if (!spec.is_free(s)) return false;
    s = step(spec, s, episode.actions[t]);
    if (s != episode.states[t + 1]) return false;
  }
  return true;
}

ChainSchedule tabular_schedule() { return {4, 10, 1}; }

ChainSchedule four_rooms_schedule() { return {4, 40, 17}; }

EpisodeChain::EpisodeChain(const GridSpec& spec, ChainSchedule schedule)
    : spec_(spec), schedule_(schedule), current_(spec.start()) {
  if (schedule.skill_count < 1) throw ConfigError("K: must be at least 1");
  if (schedule.horizon < 1) throw ConfigError("T: must be at least 1");
  if (schedule.episodes_between_resets < 1)
    throw ConfigError("episodes_between_resets: must be at least 1");
}

SkillEpisode EpisodeChain::next(const SkillPolicyFn& policy, Rng& rng) {
  if (since_reset_ == schedule_.episodes_between_resets) {
    current_ = spec_.start();
    since_reset_ = 0;
  }
  const SkillId skill = sample_skill(rng, schedule_.skill_count);
  SkillEpisode ep =
      run_skill_episode(spec_, policy, skill, current_, schedule_.horizon, rng);
  current_ = ep.end();
  ++since_reset_;
  return ep;
}

std::vector<SkillEpisode> chain_episodes(const GridSpec& spec,
                                         const SkillPolicyFn& policy,
                                         const ChainSchedule& schedule,
                                         int episode_count, Rng& rng) {
  EpisodeChain chain(spec, schedule);
  std::vector<SkillEpisode> out;
  out.reserve(episode_count);
  for (int i = 0; i < episode_count; ++i) out.push_back(chain.next(policy, rng));
  return out;
}

std::vector<VisitationSample> visitation_samples(const SkillEpisode& episode,
                                                 int n, Rng& rng) {
  require(n >= 1, "visitation_samples: n must be at least 1");
  const auto T = static_cast<std::uint64_t>(episode.horizon());
  require(T >= 1, "visitation_samples: empty episode");
  std::vector<VisitationSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t t = 1 + uniform_below(rng, T);
    out.push_back({episode.states[t], episode.start, episode.skill});
  }
  return out;
}

std::string format_episode(const SkillEpisode& episode) {
  std::string out = std::to_string(episode.skill.index) + ' ' +
                    std::to_string(episode.start.row) + ' ' +
                    std::to_string(episode.start.col) + ' ';
  for (Action a : episode.actions) out += action_symbol(a);
  return out;
}

SkillEpisode parse_episode(const GridSpec& spec, std::string_view line) {
  std::istringstream in{std::string(line)};
  int skill = 0;
  Cell start;
  std::string actions;
  if (!(in >> skill >> start.row >> start.col >> actions))
    throw ConfigError("episode record: expected '<skill> <row> <col> <actions>'");
  if (skill < 0) throw ConfigError("episode record: negative skill id");
  if (!spec.is_free(start)) throw ConfigError("episode record: invalid start cell");
  SkillEpisode ep;
  ep.skill = SkillId{skill};
  ep.start = start;
  ep.states.push_back(start);
  Cell s = start;
  for (char c : actions) {
    const auto a = action_from_symbol(c);
    if (!a) throw ConfigError(std::string("episode record: bad action '") + c + "'");
    s = step(spec, s, *a);
    ep.actions.push_back(*a);
    ep.states.push_back(s);
  }
  if (ep.actions.empty()) throw ConfigError("episode record: no actions");
  ep.rewards.assign(ep.actions.size(), 0.0);
  return ep;
}

}  // namespace wic
