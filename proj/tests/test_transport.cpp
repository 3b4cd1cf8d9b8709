#include <gtest/gtest.h>

#include <random>

#include "mrplab/transport.hpp"
#include "oracles.hpp"

using namespace mrplab;

namespace {

TransportProblem make(std::vector<double> supply, std::vector<double> demand,
                      const std::vector<std::vector<double>>& cost) {
  TransportProblem p{std::move(supply), std::move(demand), Matrix(cost.size(), cost[0].size())};
  for (std::size_t i = 0; i < cost.size(); ++i)
    for (std::size_t j = 0; j < cost[i].size(); ++j) p.cost(i, j) = cost[i][j];
  return p;
}

void expect_feasible_and_certified(const TransportProblem& p, const CouplingResult& r) {
  std::vector<double> rows(p.supply.size(), 0.0);
  std::vector<double> cols(p.demand.size(), 0.0);
  double cost = 0.0;
  for (const auto& e : r.plan) {
    EXPECT_GT(e.mass, 0.0);
    rows[e.row] += e.mass;
    cols[e.col] += e.mass;
    cost += e.mass * p.cost(e.row, e.col);
    // Complementary slackness on the support.
    EXPECT_NEAR(p.cost(e.row, e.col), r.row_potential[e.row] + r.col_potential[e.col], 1e-9);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_NEAR(rows[i], p.supply[i], 1e-10);
  for (std::size_t j = 0; j < cols.size(); ++j) EXPECT_NEAR(cols[j], p.demand[j], 1e-10);
  EXPECT_NEAR(cost, r.optimal_cost, 1e-10);
  // Dual feasibility: every reduced cost is nonnegative.
  double dual = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dual += r.row_potential[i] * p.supply[i];
    for (std::size_t j = 0; j < cols.size(); ++j)
      EXPECT_GE(p.cost(i, j) - r.row_potential[i] - r.col_potential[j], -1e-9);
  }
  for (std::size_t j = 0; j < cols.size(); ++j) dual += r.col_potential[j] * p.demand[j];
  EXPECT_NEAR(dual, r.optimal_cost, 1e-9);
}

}  // namespace

TEST(Transport, TwoByTwoDiagonal) {
  const auto p = make({0.5, 0.5}, {0.5, 0.5}, {{1, 2}, {3, 1}});
  const auto r = solve_transportation(p);
  EXPECT_NEAR(r.optimal_cost, 1.0, 1e-15);
  ASSERT_EQ(r.plan.size(), 2u);
  for (const auto& e : r.plan) {
    EXPECT_EQ(e.row, e.col);
    EXPECT_DOUBLE_EQ(e.mass, 0.5);
  }
  expect_feasible_and_certified(p, r);
}

TEST(Transport, SingleCell) {
  const auto r = solve_transportation(make({1.0}, {1.0}, {{7.5}}));
  EXPECT_DOUBLE_EQ(r.optimal_cost, 7.5);
  ASSERT_EQ(r.plan.size(), 1u);
}

TEST(Transport, ZeroCosts) {
  const auto p = make({0.2, 0.3, 0.5}, {0.6, 0.4}, {{0, 0}, {0, 0}, {0, 0}});
  const auto r = solve_transportation(p);
  EXPECT_EQ(r.optimal_cost, 0.0);
  expect_feasible_and_certified(p, r);
}

TEST(Transport, InfeasibleMarginals) {
  EXPECT_THROW(solve_transportation(make({0.5, 0.5}, {0.5, 0.4}, {{1, 1}, {1, 1}})), InfeasibleMarginalsError);
  EXPECT_THROW(solve_transportation(make({1.2, -0.2}, {0.5, 0.5}, {{1, 1}, {1, 1}})), InfeasibleMarginalsError);
  TransportProblem empty;
  EXPECT_THROW(solve_transportation(empty), InfeasibleMarginalsError);
}

TEST(Transport, DegenerateMarginalsDoNotCycle) {
  // Many equal partial sums give a highly degenerate basis.
  const auto p = make({0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25},
                      {{4, 3, 2, 1}, {3, 4, 1, 2}, {2, 1, 4, 3}, {1, 2, 3, 4}});
  const auto r = solve_transportation(p);
  EXPECT_NEAR(r.optimal_cost, 1.0, 1e-12);
  expect_feasible_and_certified(p, r);
}

namespace {

// Random problem whose marginals are multiples of 1/denominator.
void check_against_flow_oracle(std::size_t m, std::size_t n, int denominator, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto split = [&](std::size_t k) {
    std::vector<int> units(k, 0);
    for (int u = 0; u < denominator; ++u) ++units[rng() % k];
    return units;
  };
  const auto su = split(m);
  const auto de = split(n);
  std::vector<std::vector<std::int64_t>> icost(m, std::vector<std::int64_t>(n));
  std::vector<std::vector<double>> cost(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = static_cast<double>(icost[i][j] = 1 + rng() % 9);
  std::vector<double> supply, demand;
  for (int u : su) supply.push_back(static_cast<double>(u) / denominator);
  for (int u : de) demand.push_back(static_cast<double>(u) / denominator);
  const auto p = make(supply, demand, cost);
  const auto r = solve_transportation(p);
  const double expected = static_cast<double>(oracle::min_cost_integer_flow(su, de, icost)) / denominator;
  EXPECT_NEAR(r.optimal_cost, expected, 1e-12) << "seed " << seed;
  expect_feasible_and_certified(p, r);
}

}  // namespace

TEST(Transport, MatchesIntegerFlowOracleSixBySix) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) check_against_flow_oracle(6, 6, 12, seed);
}

TEST(Transport, MatchesIntegerFlowOracleRectangular) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) check_against_flow_oracle(2 + seed % 3, 5 - seed % 3, 16, seed);
}

TEST(Transport, MatchesIntegerFlowOracleFineGrain) {
  for (std::uint64_t seed = 200; seed < 210; ++seed) check_against_flow_oracle(3, 3, 64, seed);
}
