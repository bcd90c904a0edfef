#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wic/gridworld.hpp"
#include "wic/random.hpp"

namespace wic {

struct SkillId {
  int index = 0;

  friend constexpr auto operator<=>(const SkillId&, const SkillId&) = default;
};

// One T-step rollout under a fixed skill. states holds s_0..s_T, actions
// a_0..a_{T-1}; rewards are filled in after the fact by an objective.
struct SkillEpisode {
  SkillId skill;
  Cell start;
  std::vector<Cell> states;
  std::vector<Action> actions;
  std::vector<double> rewards;

  int horizon() const { return static_cast<int>(actions.size()); }
  Cell end() const { return states.back(); }

  friend bool operator==(const SkillEpisode&, const SkillEpisode&) = default;
};

// One draw from the visitation distribution of an episode.
struct VisitationSample {
  Cell state;
  Cell start;
  SkillId skill;
};

// Samples an action for (state, skill).
using SkillPolicyFn = std::function<Action(Cell, SkillId, Rng&)>;

SkillId sample_skill(Rng& rng, int skill_count);

SkillEpisode run_skill_episode(const GridSpec& spec, const SkillPolicyFn& policy,
                               SkillId skill, Cell s0, int horizon, Rng& rng);

// Re-applies the actions through step() and checks every state, the start
// cell, and the record lengths.
bool replay_matches(const GridSpec& spec, const SkillEpisode& episode);

struct ChainSchedule {
  int skill_count = 4;
  int horizon = 10;
  // Episodes run back-to-back before the agent returns to the start cell.
  // 1 resets after every episode.
  int episodes_between_resets = 1;
};

ChainSchedule tabular_schedule();
ChainSchedule four_rooms_schedule();

// Stateful generator of chained skill episodes: the end state of one episode
// is the start of the next, with a reset to the spec's start cell every
// episodes_between_resets episodes.
class EpisodeChain {
 public:
  EpisodeChain(const GridSpec& spec, ChainSchedule schedule);

  SkillEpisode next(const SkillPolicyFn& policy, Rng& rng);

  Cell current() const { return current_; }
  const ChainSchedule& schedule() const { return schedule_; }

 private:
  GridSpec spec_;
  ChainSchedule schedule_;
  Cell current_;
  int since_reset_ = 0;
};

std::vector<SkillEpisode> chain_episodes(const GridSpec& spec,
                                         const SkillPolicyFn& policy,
                                         const ChainSchedule& schedule,
                                         int episode_count, Rng& rng);

// Each sample picks t uniformly from 1..T and returns (s_t, s_0, skill).
std::vector<VisitationSample> visitation_samples(const SkillEpisode& episode,
                                                 int n, Rng& rng);

// Line format: "<skill> <start_row> <start_col> <actions>" where actions is a
// string over U/D/L/R/N. Parsing replays the actions to rebuild the states.
std::string format_episode(const SkillEpisode& episode);
SkillEpisode parse_episode(const GridSpec& spec, std::string_view line);

}  // namespace wic
