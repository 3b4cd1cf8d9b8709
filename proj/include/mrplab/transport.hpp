#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "mrplab/errors.hpp"
#include "mrplab/linalg.hpp"

namespace mrplab {

// Balanced transportation problem: ship `supply` to `demand` at unit `cost`.
struct TransportProblem {
  std::vector<double> supply;
  std::vector<double> demand;
  Matrix cost;  // supply.size() x demand.size()
};

struct PlanEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double mass = 0.0;
};

struct CouplingResult {
  double optimal_cost = 0.0;
  std::vector<PlanEntry> plan;      // positive masses only
  std::vector<double> row_potential;  // u, with c_ij >= u_i + v_j at optimum
  std::vector<double> col_potential;  // v
  std::size_t pivots = 0;
};

inline constexpr double kMarginalTolerance = 1e-12;

namespace detail {

struct BasicCell {
  std::size_t row;
  std::size_t col;
  double flow;
};

}  // namespace detail

// Transportation simplex (MODI / u-v method). Starts from the north-west
// corner basis, which always has m + n - 1 cells forming a spanning tree
// (zero-flow cells keep degenerate bases connected). Entering and leaving
// cells follow Bland's smallest-index rule, so the method cannot cycle.
// Optimality is certified by the returned dual potentials: every reduced
// cost c_ij - u_i - v_j is non-negative within tolerance.
inline CouplingResult solve_transportation(const TransportProblem& problem) {
  const std::size_t m = problem.supply.size();
  const std::size_t n = problem.demand.size();
  if (m == 0 || n == 0) throw InfeasibleMarginalsError("transportation: empty marginals");
  if (problem.cost.rows() != m || problem.cost.cols() != n) {
    throw UsageError("transportation: cost matrix shape does not match the marginals");
  }
  double total_supply = 0.0;
  double total_demand = 0.0;
  for (double s : problem.supply) {
    if (!(s >= 0.0)) throw InfeasibleMarginalsError("transportation: negative supply");
    total_supply += s;
  }
  for (double d : problem.demand) {
    if (!(d >= 0.0)) throw InfeasibleMarginalsError("transportation: negative demand");
    total_demand += d;
  }
  if (std::abs(total_supply - total_demand) > kMarginalTolerance * std::max(1.0, total_supply)) {
    throw InfeasibleMarginalsError("transportation: supply sums to " + std::to_string(total_supply) +
                                   " but demand sums to " + std::to_string(total_demand));
  }
  double cost_scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (double c : problem.cost.row(i)) {
      if (!std::isfinite(c)) throw UsageError("transportation: non-finite cost");
      cost_scale = std::max(cost_scale, std::abs(c));
    }
  }
  const double reduced_tol = 1e-9 * cost_scale;

  // North-west corner.
  std::vector<detail::BasicCell> basis;
  basis.reserve(m + n - 1);
  {
    std::vector<double> s = problem.supply;
    std::vector<double> d = problem.demand;
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double x = std::min(s[i], d[j]);
      basis.push_back({i, j, x});
      s[i] -= x;
      d[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const std::size_t nodes = m + n;  // rows are 0..m-1, columns m..m+n-1
  std::vector<double> u(m);
  std::vector<double> v(n);
  std::vector<std::vector<std::size_t>> adjacency(nodes);  // basis cell indices
  std::vector<std::size_t> parent_cell(nodes);
  std::vector<char> seen(nodes);
  const std::size_t none = std::numeric_limits<std::size_t>::max();

  auto rebuild_tree = [&](std::size_t root) {
    for (auto& a : adjacency) a.clear();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      adjacency[basis[k].row].push_back(k);
      adjacency[m + basis[k].col].push_back(k);
    }
    std::fill(seen.begin(), seen.end(), 0);
    std::fill(parent_cell.begin(), parent_cell.end(), none);
    std::deque<std::size_t> queue{root};
    seen[root] = 1;
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      for (std::size_t k : adjacency[node]) {
        const std::size_t other = node < m ? m + basis[k].col : basis[k].row;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_cell[other] = k;
        queue.push_back(other);
      }
    }
  };

  const std::size_t max_pivots = 50 * (m + n) * (m + n) + 1000;
  std::size_t pivots = 0;
  while (true) {
    // Potentials from u_0 = 0 along the tree rooted at row 0.
    rebuild_tree(0);
    std::vector<std::size_t> order;
    order.reserve(nodes);
    {
      std::fill(seen.begin(), seen.end(), 0);
      std::deque<std::size_t> queue{0};
      seen[0] = 1;
      u[0] = 0.0;
      while (!queue.empty()) {
        const std::size_t node = queue.front();
        queue.pop_front();
        for (std::size_t k : adjacency[node]) {
          const auto& cell = basis[k];
          const double c = problem.cost(cell.row, cell.col);
          if (node < m) {
            const std::size_t col_node = m + cell.col;
            if (seen[col_node]) continue;
            seen[col_node] = 1;
            v[cell.col] = c - u[cell.row];
            queue.push_back(col_node);
          } else {
            if (seen[cell.row]) continue;
            seen[cell.row] = 1;
            u[cell.row] = c - v[cell.col];
            queue.push_back(cell.row);
          }
        }
      }
    }

    // Bland: first cell in row-major order with a negative reduced cost.
    std::size_t enter_row = none;
    std::size_t enter_col = none;
    for (std::size_t i = 0; i < m && enter_row == none; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (problem.cost(i, j) - u[i] - v[j] < -reduced_tol) {
          enter_row = i;
          enter_col = j;
          break;
        }
      }
    }
    if (enter_row == none) break;
    if (++pivots > max_pivots) throw NumericalError("transportation simplex exceeded its pivot budget");

    // Cycle: the tree path from column enter_col back to row enter_row.
    rebuild_tree(enter_row);
    std::vector<std::size_t> path;  // basis cell indices, alternating -, +, -, ...
    for (std::size_t node = m + enter_col; node != enter_row;) {
      const std::size_t k = parent_cell[node];
      path.push_back(k);
      node = node < m ? m + basis[k].col : basis[k].row;
    }
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < path.size(); p += 2) theta = std::min(theta, basis[path[p]].flow);
    std::size_t leave = none;
    std::size_t leave_key = none;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const auto& cell = basis[path[p]];
      if (cell.flow != theta) continue;
      const std::size_t key = cell.row * n + cell.col;
      if (key < leave_key) {
        leave_key = key;
        leave = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      auto& cell = basis[path[p]];
      cell.flow = (p % 2 == 0) ? cell.flow - theta : cell.flow + theta;
    }
    basis[leave] = {enter_row, enter_col, theta};
  }

  CouplingResult result;
  result.pivots = pivots;
  result.row_potential = u;
  result.col_potential = v;
  for (const auto& cell : basis) {
    if (cell.flow > 0.0) {
      result.plan.push_back({cell.row, cell.col, cell.flow});
      result.optimal_cost += cell.flow * problem.cost(cell.row, cell.col);
    }
  }
  std::sort(result.plan.begin(), result.plan.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return result;
}

}  // namespace mrplab
