#include <gtest/gtest.h>

#include "mrplab/analysis.hpp"
#include "mrplab/coupling.hpp"
#include "mrplab/generators.hpp"
#include "mrplab/reachability.hpp"
#include "oracles.hpp"

using namespace mrplab;

namespace {

const RewardDist kZero = RewardDist::constant(0.0);

std::vector<StateId> ids(std::initializer_list<std::size_t> xs, bool terminal = true) {
  std::vector<StateId> out;
  for (auto x : xs) out.emplace_back(x);
  if (terminal) out.push_back(StateId::terminal());
  return out;
}

// Two heads a, b; a -> s2 -> s3 -> ... -> s_m -> end, b -> s3.
MrpSpec two_heads_into_chain(std::size_t m) {
  std::vector<std::string> names{"a", "b"};
  for (std::size_t i = 2; i <= m; ++i) names.push_back("s" + std::to_string(i));
  std::vector<std::vector<Edge>> tr(names.size());
  const auto chain = [](std::size_t i) { return StateId(i); };  // s_i lives at index i
  tr[0] = {{chain(2), 1.0, kZero}};
  tr[1] = {{chain(3), 1.0, kZero}};
  for (std::size_t i = 2; i <= m; ++i)
    tr[i] = {{i == m ? StateId::terminal() : chain(i + 1), 1.0, RewardDist::gaussian(0.0, 1.0)}};
  return MrpSpec(names, tr, {{StateId(0), 0.5}, {StateId(1), 0.5}});
}

MrpSpec funnel() {
  return MrpSpec({"a", "b", "m"},
                 {{{StateId(2), 1.0, kZero}},
                  {{StateId(2), 1.0, kZero}},
                  {{StateId::terminal(), 1.0, RewardDist::gaussian(0.0, 1.0)}}},
                 {{StateId(0), 0.5}, {StateId(1), 0.5}});
}

}  // namespace

TEST(CrossingCost, Examples) {
  EXPECT_EQ(crossing_cost(ids({0, 2}), ids({1, 2})), 1u);
  EXPECT_EQ(crossing_cost(ids({0, 2, 3, 4}), ids({1, 3, 4})), 2u);
  // Disjoint chains of length L meet only at the terminal state, at t = L.
  for (std::size_t len = 1; len <= 6; ++len) {
    std::vector<StateId> a, b;
    for (std::size_t i = 0; i < len; ++i) {
      a.emplace_back(i);
      b.emplace_back(100 + i);
    }
    a.push_back(StateId::terminal());
    b.push_back(StateId::terminal());
    EXPECT_EQ(crossing_cost(a, b), len);
  }
  // Unequal lengths: the shorter path is padded with the terminal state.
  EXPECT_EQ(crossing_cost(ids({0}), ids({5, 6, 7})), 3u);
  // The second path reaching the first one's start counts.
  EXPECT_EQ(crossing_cost(ids({0, 9, 8}), ids({1, 0, 9})), 1u);
  // The second path's start is not in its index set, so a shared start does not count.
  EXPECT_EQ(crossing_cost(ids({3, 4}), ids({3, 5})), 2u);
  // Paths are padded with the terminal state, so the cost is always finite.
  EXPECT_EQ(crossing_cost(ids({0, 1}, false), ids({2, 3}, false)), 2u);
}

TEST(Enumeration, ProbabilitiesAndMerging) {
  const MrpSpec m({"s0", "s1"},
                  {{{StateId(1), 0.25, kZero}, {StateId(1), 0.25, RewardDist::constant(1.0)},
                    {StateId::terminal(), 0.5, kZero}},
                   {{StateId::terminal(), 1.0, kZero}}},
                  {{StateId(0), 1.0}});
  const auto atoms = enumerate_trajectories(m, StateId(0));
  ASSERT_EQ(atoms.size(), 2u);
  double total = 0.0;
  for (const auto& a : atoms) {
    total += a.prob;
    EXPECT_DOUBLE_EQ(a.prob, 0.5);
    EXPECT_TRUE(a.path.back().is_terminal());
  }
  EXPECT_DOUBLE_EQ(total, 1.0);
  EXPECT_EQ(enumerate_trajectories(gen_layered(1, 6, 0.0, 1), StateId(0)).size(), 1u);
  // Three layers of width three: two forward steps.
  EXPECT_EQ(enumerate_trajectories(gen_layered(3, 4, 0.0, 1), StateId(0)).size(), 9u);
}

TEST(Enumeration, Errors) {
  const MrpSpec cyc = gen_layered(3, 4, 0.5, 3);
  ASSERT_FALSE(is_acyclic(cyc));
  EXPECT_THROW(enumerate_trajectories(cyc, StateId(0)), CyclicSpecError);
  EXPECT_THROW(crossing_time_exact(cyc, StateId(0), StateId(1)), CyclicSpecError);
  const MrpSpec big = gen_layered(5, 10, 0.0, 3);
  EXPECT_THROW(enumerate_trajectories(big, StateId(0), 1000), EnumerationCapExceeded);
  EXPECT_THROW(enumerate_trajectories(big, StateId::terminal()), UsageError);
}

TEST(CrossingTime, TwoHeadsCrossInTwoStepsForAnyChainLength) {
  for (std::size_t m = 3; m <= 10; ++m) {
    const MrpSpec spec = two_heads_into_chain(m);
    EXPECT_DOUBLE_EQ(crossing_time_exact(spec, StateId(0), StateId(1)).value, 2.0) << m;
  }
}

TEST(CrossingTime, FunnelAndMeetingFamily) {
  EXPECT_DOUBLE_EQ(crossing_time_exact(funnel(), StateId(0), StateId(1)).value, 1.0);
  for (std::size_t t = 3; t <= 8; ++t) {
    const MrpSpec m = gen_meeting(2, t, t, RewardDist::gaussian(0.0, 1.0));
    EXPECT_DOUBLE_EQ(crossing_time_exact(m, m.id("h1"), m.id("h2")).value, static_cast<double>(t - 1));
    const MrpSpec early = gen_meeting(3, 2, t, RewardDist::gaussian(0.0, 1.0));
    EXPECT_DOUBLE_EQ(crossing_time_exact(early, early.id("h1"), early.id("h3")).value, 1.0);
  }
}

TEST(CrossingTime, OptimumBelowIndependentCouplingAndHittingTimes) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const MrpSpec m = oracle::random_acyclic(6, seed);
    const auto exact = analyze(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      for (std::size_t sp = s + 1; sp < m.size(); ++sp) {
        const auto h = crossing_time_exact(m, StateId(s), StateId(sp));
        const auto a = enumerate_trajectories(m, StateId(s));
        const auto b = enumerate_trajectories(m, StateId(sp));
        double indep = 0.0;
        for (const auto& x : a)
          for (const auto& y : b) indep += x.prob * y.prob * static_cast<double>(crossing_cost(x.path, y.path));
        EXPECT_LE(h.value, indep + 1e-12);
        EXPECT_GE(h.value, 1.0 - 1e-12);
        // Both trajectories have terminated by max(len, len') <= len + len'.
        EXPECT_LE(h.value, exact.expected_horizon[s] + exact.expected_horizon[sp] + 1e-12);
      }
    }
  }
}

TEST(CrossingTime, MatchesIntegerFlowOracle) {
  int checked = 0;
  int nontrivial = 0;
  for (std::uint64_t seed = 0; checked < 20; ++seed) {
    const MrpSpec m = oracle::random_acyclic(5, 1000 + seed, 4, 2);
    const auto a = enumerate_trajectories(m, StateId(0));
    const auto b = enumerate_trajectories(m, StateId(1));
    if (a.size() > 6 || b.size() > 6) continue;
    // Smallest power of two that makes every atom probability an integer.
    int scale = 1;
    auto integral = [&](double p) { return p * scale == std::floor(p * scale); };
    while (scale <= 32 && !(std::all_of(a.begin(), a.end(), [&](const auto& x) { return integral(x.prob); }) &&
                            std::all_of(b.begin(), b.end(), [&](const auto& x) { return integral(x.prob); })))
      scale *= 2;
    if (scale > 32) continue;
    ++checked;
    if (a.size() > 1 && b.size() > 1) ++nontrivial;
    std::vector<int> su, de;
    for (const auto& x : a) su.push_back(static_cast<int>(std::lround(x.prob * scale)));
    for (const auto& y : b) de.push_back(static_cast<int>(std::lround(y.prob * scale)));
    std::vector<std::vector<std::int64_t>> cost(a.size(), std::vector<std::int64_t>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) cost[i][j] = crossing_cost(a[i].path, b[j].path);
    const double expected = static_cast<double>(oracle::min_cost_integer_flow(su, de, cost)) / scale;
    EXPECT_EQ(crossing_time_exact(m, StateId(0), StateId(1)).value, expected) << "seed " << seed;
  }
  EXPECT_GE(nontrivial, 10);
}

TEST(CrossingTime, MonteCarloUpperBound) {
  EXPECT_EQ(crossing_time_upper(funnel(), StateId(0), StateId(1), 100, 3).mean, 1.0);
  EXPECT_EQ(crossing_time_upper(funnel(), StateId(0), StateId(1), 100, 3).standard_error, 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MrpSpec m = oracle::random_acyclic(6, 50 + seed);
    const auto h = crossing_time_exact(m, StateId(0), StateId(1)).value;
    const auto est = crossing_time_upper(m, StateId(0), StateId(1), 20000, seed);
    EXPECT_GE(est.mean, h - 3.0 * est.standard_error);
  }
  // Works on cyclic processes, and is deterministic in the seed.
  const MrpSpec cyc = gen_layered(3, 6, 0.3, 9);
  const auto e1 = crossing_time_upper(cyc, StateId(0), StateId(1), 500, 4);
  const auto e2 = crossing_time_upper(cyc, StateId(0), StateId(1), 500, 4);
  EXPECT_EQ(e1.mean, e2.mean);
  EXPECT_GE(e1.mean, 1.0);
  EXPECT_THROW(crossing_time_upper(cyc, StateId(0), StateId(1), 1, 4), PreconditionError);
}

TEST(Disjoint, Examples) {
  EXPECT_TRUE(check_disjoint(funnel(), StateId(0), StateId(1)));
  // Heads of separate chains never share a trajectory under any initial distribution.
  const MrpSpec meet = gen_meeting(3, 6, 6, RewardDist::gaussian(0.0, 1.0));
  EXPECT_TRUE(check_disjoint(meet, meet.id("h1"), meet.id("h2")));
  // A state and its successor share trajectories.
  EXPECT_FALSE(check_disjoint(meet, meet.id("h1"), meet.id("h1_2")));
  EXPECT_FALSE(check_disjoint(meet, meet.id("h1"), meet.id("h1")));
  // With a backward edge, two states of layer 1 can appear together.
  const MrpSpec cyc = gen_layered(2, 4, 0.9, 5);
  EXPECT_FALSE(check_disjoint(cyc, StateId(0), StateId(1)));
  EXPECT_TRUE(check_disjoint(gen_layered(2, 4, 0.0, 5), StateId(0), StateId(1)));
}
