#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

#include "doctest.h"
#include "wic/errors.hpp"
#include "wic/skill_runtime.hpp"

using namespace wic;

namespace {

SkillPolicyFn constant(Action a) {
  return [a](Cell, SkillId, Rng&) { return a; };
}

SkillPolicyFn uniform_random() {
  return [](Cell, SkillId, Rng& rng) {
    return kAllActions[uniform_below(rng, kNumActions)];
  };
}

}  // namespace

TEST_CASE("sample_skill is uniform") {
  Rng rng(1);
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_skill(rng, 4).index];
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) <= 0.01);
}

TEST_CASE("sample_skill edge cases") {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) CHECK(sample_skill(rng, 1).index == 0);
  CHECK_THROWS_AS(sample_skill(rng, 0), ConfigError);
  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 1000; ++i) CHECK(sample_skill(a, 7) == sample_skill(b, 7));
}

TEST_CASE("run_skill_episode shapes and reachability") {
  const GridSpec g = tabular15_spec();
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ep = run_skill_episode(g, uniform_random(), SkillId{1}, g.start(), 10, rng);
    CHECK(ep.states.size() == 11);
    CHECK(ep.actions.size() == 10);
    CHECK(ep.rewards == std::vector<double>(10, 0.0));
    CHECK(ep.states.front() == g.start());
    CHECK(ep.start == g.start());
    for (const Cell s : ep.states)
      CHECK(std::abs(s.row - 7) + std::abs(s.col - 7) <= 10);
    CHECK(replay_matches(g, ep));
  }
}

TEST_CASE("run_skill_episode fixed policies") {
  const GridSpec g = tabular15_spec();
  Rng rng(4);
  const auto noop = run_skill_episode(g, constant(Action::NoOp), SkillId{0}, {3, 5}, 6, rng);
  for (const Cell s : noop.states) CHECK(s == Cell{3, 5});
  const auto up = run_skill_episode(g, constant(Action::Up), SkillId{0}, {7, 7}, 10, rng);
  CHECK(up.end() == Cell{0, 7});
  CHECK_THROWS_AS(run_skill_episode(g, constant(Action::Up), SkillId{0}, {7, 7}, 0, rng),
                  ContractViolation);
}

TEST_CASE("replay detects tampering") {
  const GridSpec g = tabular15_spec();
  Rng rng(5);
  auto ep = run_skill_episode(g, constant(Action::Right), SkillId{2}, {7, 7}, 5, rng);
  CHECK(replay_matches(g, ep));
  ep.states[3] = Cell{0, 0};
  CHECK_FALSE(replay_matches(g, ep));
}

TEST_CASE("tabular chain resets to the center every episode") {
  const GridSpec g = tabular15_spec();
  Rng rng(6);
  const auto eps = chain_episodes(g, uniform_random(), tabular_schedule(), 3, rng);
  REQUIRE(eps.size() == 3);
  for (const auto& ep : eps) CHECK(ep.start == Cell{7, 7});
}

TEST_CASE("four-rooms chain continues from the last end state and resets after 17") {
  const GridSpec g = four_rooms_spec();
  Rng rng(7);
  const auto eps = chain_episodes(g, uniform_random(), four_rooms_schedule(), 35, rng);
  REQUIRE(eps.size() == 35);
  CHECK(eps[0].start == g.start());
  for (int i = 1; i < 35; ++i) {
    if (i % 17 == 0) CHECK(eps[i].start == g.start());
    else CHECK(eps[i].start == eps[i - 1].end());
    CHECK(eps[i].horizon() == 40);
    CHECK(replay_matches(g, eps[i]));
  }
  // The 18th episode (index 17) is the first after a reset.
  CHECK(eps[17].start == Cell{9, 3});
}

TEST_CASE("R = 1 with a NoOp policy keeps every start identical") {
  const GridSpec g = four_rooms_spec();
  Rng rng(8);
  ChainSchedule s{4, 5, 1};
  for (const auto& ep : chain_episodes(g, constant(Action::NoOp), s, 10, rng))
    CHECK(ep.start == g.start());
}

TEST_CASE("chains are reproducible under a fixed seed") {
  const GridSpec g = four_rooms_spec();
  Rng a(11);
  Rng b(11);
  CHECK(chain_episodes(g, uniform_random(), four_rooms_schedule(), 40, a) ==
        chain_episodes(g, uniform_random(), four_rooms_schedule(), 40, b));
}

TEST_CASE("visitation samples follow the time-averaged distribution") {
  const GridSpec g = tabular15_spec();
  Rng rng(12);
  SUBCASE("NoOp episode collapses to s0") {
    const auto ep = run_skill_episode(g, constant(Action::NoOp), SkillId{0}, {2, 2}, 10, rng);
    for (const auto& v : visitation_samples(ep, 100, rng)) CHECK(v.state == Cell{2, 2});
  }
  SUBCASE("single sample lies on steps 1..T") {
    const auto ep = run_skill_episode(g, constant(Action::Right), SkillId{3}, {7, 0}, 10, rng);
    const auto v = visitation_samples(ep, 1, rng);
    REQUIRE(v.size() == 1);
    CHECK(v[0].state.row == 7);
    CHECK(v[0].state.col >= 1);
    CHECK(v[0].state.col <= 10);
    CHECK(v[0].skill == SkillId{3});
    CHECK(v[0].start == Cell{7, 0});
  }
  SUBCASE("straight line: 1/T per cell") {
    const int T = 10;
    const auto ep = run_skill_episode(g, constant(Action::Right), SkillId{0}, {7, 0}, T, rng);
    const int n = 100000;
    std::map<Cell, int> counts;
    for (const auto& v : visitation_samples(ep, n, rng)) ++counts[v.state];
    // Exact Eq. 1 mass: each of s_1..s_T carries 1/T; s_0 carries none.
    double tv = 0.0;
    CHECK(counts.count(Cell{7, 0}) == 0);
    for (int t = 1; t <= T; ++t) {
      const double freq = counts[Cell{7, t}] / double(n);
      CHECK(std::abs(freq - 1.0 / T) <= 0.02 / T);
      tv += std::abs(freq - 1.0 / T);
    }
    CHECK(0.5 * tv <= 0.02);
  }
  SUBCASE("clamped episode: repeated cells accumulate mass") {
    const int T = 10;
    const auto ep = run_skill_episode(g, constant(Action::Up), SkillId{0}, {3, 3}, T, rng);
    std::map<Cell, double> exact;
    for (int t = 1; t <= T; ++t) exact[ep.states[t]] += 1.0 / T;
    const int n = 100000;
    std::map<Cell, double> freq;
    for (const auto& v : visitation_samples(ep, n, rng)) freq[v.state] += 1.0 / n;
    double tv = 0.0;
    for (const auto& [c, p] : exact) tv += std::abs(freq[c] - p);
    CHECK(0.5 * tv <= 0.02);
    CHECK(exact[Cell{0, 3}] == doctest::Approx(0.8));
  }
}

TEST_CASE("episode text format round trip") {
  const GridSpec g = four_rooms_spec();
  Rng rng(13);
  for (const auto& ep : chain_episodes(g, uniform_random(), four_rooms_schedule(), 20, rng)) {
    const auto line = format_episode(ep);
    CHECK(parse_episode(g, line) == ep);
  }
  CHECK(format_episode(run_skill_episode(tabular15_spec(), constant(Action::Left), SkillId{1},
                                         {7, 7}, 3, rng)) == "1 7 7 LLL");
  CHECK_THROWS(parse_episode(g, "0 9 3 UXD"));
  CHECK_THROWS(parse_episode(g, "0 0 0 UU"));
}
