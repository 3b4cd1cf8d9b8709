#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mrplab/analysis.hpp"
#include "mrplab/errors.hpp"
#include "mrplab/linalg.hpp"
#include "mrplab/mrp.hpp"

namespace mrplab {

enum class Method { kMC, kTD };

inline std::string_view to_string(Method m) { return m == Method::kMC ? "MC" : "TD"; }

// Per-state value estimates. A state's estimate is defined iff its count is
// positive; unvisited states carry no value (never a silent zero).
// MC counts trajectories that visit the state, TD counts all visits.
struct TabularEstimate {
  Method method = Method::kMC;
  std::vector<double> values;
  std::vector<std::uint64_t> counts;

  std::size_t size() const noexcept { return values.size(); }

  bool defined(StateId s) const {
    return !s.is_terminal() && s.index() < counts.size() && counts[s.index()] > 0;
  }

  // The terminal state is worth 0 by construction.
  double value(StateId s) const {
    if (s.is_terminal()) return 0.0;
    if (!defined(s)) throw UndefinedEstimateError("#" + std::to_string(s.index()));
    return values[s.index()];
  }
};

// First-visit Monte Carlo: mean, over trajectories that reach s, of the
// rewards collected from the first visit onwards.
inline TabularEstimate mc_estimate(const Dataset& data, const MrpSpec& spec) {
  const std::size_t n = spec.size();
  TabularEstimate est;
  est.method = Method::kMC;
  est.values.assign(n, 0.0);
  est.counts.assign(n, 0);

  std::vector<std::size_t> stamp(n, static_cast<std::size_t>(-1));
  std::vector<double> tail;
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const Trajectory& t = data.trajectories[i];
    const std::size_t len = t.states.size();
    tail.assign(len + 1, 0.0);
    for (std::size_t k = len; k-- > 0;) tail[k] = t.rewards[k] + tail[k + 1];
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t s = t.states[k].index();
      if (stamp[s] == i) continue;
      stamp[s] = i;
      est.values[s] += tail[k];
      ++est.counts[s];
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (est.counts[s] > 0) est.values[s] /= static_cast<double>(est.counts[s]);
  }
  return est;
}

// Tabular TD fixed point: solves the empirical Bellman equation
//   V(s) = r_hat(s) + sum_x P_hat(x | s) V(x),  V(terminal) = 0
// over the visited states, using every (S_t, R_{t+1}, S_{t+1}) tuple.
inline TabularEstimate td_estimate(const Dataset& data, const MrpSpec& spec) {
  const std::size_t n = spec.size();
  TabularEstimate est;
  est.method = Method::kTD;
  est.values.assign(n, 0.0);
  est.counts.assign(n, 0);

  for (const Trajectory& t : data.trajectories) {
    for (StateId s : t.states) ++est.counts[s.index()];
  }
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(n, kUnvisited);
  std::vector<std::size_t> visited;
  for (std::size_t s = 0; s < n; ++s) {
    if (est.counts[s] > 0) {
      local[s] = visited.size();
      visited.push_back(s);
    }
  }
  const std::size_t m = visited.size();
  if (m == 0) return est;

  Matrix transitions(m, m);
  std::vector<double> reward_sum(m, 0.0);
  for (const Trajectory& t : data.trajectories) {
    const std::size_t len = t.states.size();
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t from = local[t.states[k].index()];
      reward_sum[from] += t.rewards[k];
      if (k + 1 < len) transitions(from, local[t.states[k + 1].index()]) += 1.0;
    }
  }
  Matrix system = Matrix::identity(m);
  std::vector<double> rhs(m);
  for (std::size_t a = 0; a < m; ++a) {
    const double count = static_cast<double>(est.counts[visited[a]]);
    rhs[a] = reward_sum[a] / count;
    const auto row = transitions.row(a);
    for (std::size_t b = 0; b < m; ++b) {
      if (row[b] != 0.0) system(a, b) -= row[b] / count;
    }
  }
  const auto solution = LuDecomposition(std::move(system)).solve(rhs);
  for (std::size_t a = 0; a < m; ++a) est.values[visited[a]] = solution[a];
  return est;
}

inline TabularEstimate estimate(Method method, const Dataset& data, const MrpSpec& spec) {
  return method == Method::kMC ? mc_estimate(data, spec) : td_estimate(data, spec);
}

inline double advantage(const TabularEstimate& est, StateId s, StateId s_prime) {
  const double a = est.value(s);
  const double b = est.value(s_prime);
  return s == s_prime ? 0.0 : a - b;
}

inline double weighted_estimate(const TabularEstimate& est, const Weighting& pi) {
  double j = 0.0;
  for (const auto& [s, w] : pi.entries()) j += w * est.value(s);
  return j;
}

}  // namespace mrplab
